"""Artinian local BCAs K[[t_1..t_r]]/I for monomial m-primary ideals I, and
coefficient fields given by nilpotent corrections to the canonical one."""
from __future__ import annotations

from itertools import product
from math import factorial

from ..errors import DescriptorMismatchError, UnsupportedShapeError
from ..series import Laurent, TlfDescriptor, monomial_text


def _divides(g, m) -> bool:
    return all(a <= b for a, b in zip(g, m))


def minimal_generators(gens) -> tuple:
    gens = sorted(set(tuple(g) for g in gens), key=monomial_key)
    out = []
    for g in gens:
        if not any(_divides(h, g) for h in out):
            out.append(g)
    return tuple(out)


def monomial_key(m):
    """Total degree, then lexicographic with the first variable largest."""
    return (sum(m), tuple(-k for k in m))


def standard_monomials(gens, r: int) -> list:
    if r == 0:
        return [()]
    bounds = []
    for j in range(r):
        pure = [g[j] for g in gens if all(k == 0 for i, k in enumerate(g) if i != j)]
        if not pure:
            raise ValueError("ideal is not m-primary: no pure power of every variable")
        bounds.append(min(pure))
    mons = [m for m in product(*[range(b) for b in bounds]) if not any(_divides(g, m) for g in gens)]
    return sorted(mons, key=monomial_key)


class ArtinianBca:
    """A = K[[t]]/I with K the coefficient TLF of the canonical coefficient field."""

    def __init__(self, coeff_tlf: TlfDescriptor, nilp_vars, ideal):
        nilp_vars = tuple(nilp_vars)
        if len(set(nilp_vars)) != len(nilp_vars):
            raise ValueError("nilpotent variable names must be distinct")
        if set(nilp_vars) & (set(coeff_tlf.all_vars) | set(coeff_tlf.coeff_field.names())):
            raise ValueError("nilpotent variables clash with coefficient variables")
        r = len(nilp_vars)
        gens = minimal_generators(ideal)
        for g in gens:
            if len(g) != r:
                raise ValueError(f"ideal generator {g} has wrong length")
            if sum(g) == 0:
                raise ValueError("the ideal must be proper")
        self.coeff_tlf = coeff_tlf
        self.nilp_vars = nilp_vars
        self.ideal = gens
        self.basis = standard_monomials(gens, r)
        self.index = {m: i for i, m in enumerate(self.basis)}
        self.top_degree = max(sum(m) for m in self.basis)
        P = coeff_tlf.coeff_field.prime_subfield
        self.czero = P.zero
        self.cone = P.one

    @property
    def length(self) -> int:
        return len(self.basis)

    @property
    def tlf(self) -> TlfDescriptor:
        return self.coeff_tlf

    def __eq__(self, other):
        if not isinstance(other, ArtinianBca):
            return NotImplemented
        return (self.coeff_tlf, self.nilp_vars, self.ideal) == (other.coeff_tlf, other.nilp_vars, other.ideal)

    def __hash__(self):
        return hash((self.coeff_tlf, self.nilp_vars, self.ideal))

    def ideal_text(self) -> str:
        return ",".join(monomial_text(self.nilp_vars, g) for g in self.ideal)

    def __str__(self):
        if not self.nilp_vars:
            return str(self.coeff_tlf)
        return f"{self.coeff_tlf}[{','.join(self.nilp_vars)}]/({self.ideal_text()})"

    def __repr__(self):
        return f"ArtinianBca({self})"

    # -- monomial arithmetic

    def mono_index(self, m):
        return self.index.get(tuple(m))

    def var_index(self, name: str) -> int:
        try:
            return self.nilp_vars.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a nilpotent variable of {self}") from None

    # -- elements: lists of Laurent coefficients on the standard monomials

    def zero(self) -> list:
        return [self.coeff_tlf.zero() for _ in self.basis]

    def one(self) -> list:
        return self.const(self.coeff_tlf.one())

    def const(self, lam: Laurent) -> list:
        """lam . 1 under the canonical coefficient field."""
        out = self.zero()
        out[0] = lam
        return out

    def monomial(self, m, lam: Laurent | None = None) -> list:
        out = self.zero()
        i = self.mono_index(m)
        if i is not None:
            out[i] = self.coeff_tlf.one() if lam is None else lam
        return out

    def var(self, name: str) -> list:
        e = [0] * len(self.nilp_vars)
        e[self.var_index(name)] = 1
        return self.monomial(e)

    def element(self, coeffs: dict) -> list:
        """Element from {monomial: Laurent or scalar}."""
        out = self.zero()
        for m, c in coeffs.items():
            i = self.mono_index(m)
            if i is None:
                continue
            if not isinstance(c, Laurent):
                c = self.coeff_tlf.const(c)
            out[i] = out[i] + c
        return out

    def add(self, x, y) -> list:
        return [a + b for a, b in zip(x, y)]

    def sub(self, x, y) -> list:
        return [a - b for a, b in zip(x, y)]

    def scale(self, x, lam) -> list:
        return [a * lam for a in x]

    def mul(self, x, y) -> list:
        out = self.zero()
        for i, a in enumerate(x):
            if not a.terms:
                continue
            mi = self.basis[i]
            for j, b in enumerate(y):
                if not b.terms:
                    continue
                k = self.index.get(tuple(p + q for p, q in zip(mi, self.basis[j])))
                if k is not None:
                    out[k] = out[k] + a * b
        return out

    def power(self, x, n: int) -> list:
        out = self.one()
        for _ in range(n):
            out = self.mul(out, x)
        return out

    def is_zero(self, x) -> bool:
        return all(not a.terms for a in x)

    def in_max_ideal(self, x) -> bool:
        return not x[0].terms

    def equal(self, x, y) -> bool:
        return all(a == b for a, b in zip(x, y))

    def agrees(self, x, y) -> bool:
        return all(a.agrees(b) for a, b in zip(x, y))

    def format_element(self, x) -> str:
        pieces = []
        for m, a in zip(self.basis, x):
            if not a.terms and a.window is None:
                continue
            mono = monomial_text(self.nilp_vars, m)
            text = str(a)
            neg = text.startswith("-") and not _has_top_level_sum(text[1:])
            if neg:
                text = text[1:]
            if _has_top_level_sum(text):
                text = f"({text})"
            if not mono:
                body = text
            elif text == "1":
                body = mono
            else:
                body = f"{text}*{mono}"
            pieces.append((neg, body))
        if not pieces:
            return "0"
        out = ("-" if pieces[0][0] else "") + pieces[0][1]
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out


def _has_top_level_sum(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > 0 and text[i - 1] not in "^*/(":
            return True
    return False


class CoeffField:
    """sigma(v) = v + eps_v for each coordinate v of K, extended by Taylor's formula."""

    def __init__(self, bca: ArtinianBca, eps: dict | None = None):
        self.bca = bca
        tlf = bca.coeff_tlf
        eps = dict(eps or {})
        self.eps = {}
        for v in tlf.all_vars:
            x = eps.pop(v, None)
            if x is None:
                x = bca.zero()
            if len(x) != bca.length:
                raise ValueError("correction has wrong length")
            if not bca.in_max_ideal(x):
                raise ValueError(f"correction for {v} is not in the maximal ideal")
            self.eps[v] = list(x)
        if eps:
            raise KeyError(f"unknown coefficient variables {sorted(eps)}")
        p = tlf.coeff_field.characteristic
        if p and not self.is_canonical and bca.top_degree >= p:
            raise UnsupportedShapeError("Taylor extension needs p > nilpotency degree")
        self._taylor = None
        self._module_cache = {}

    @classmethod
    def canonical(cls, bca: ArtinianBca) -> "CoeffField":
        return cls(bca, {})

    @property
    def is_canonical(self) -> bool:
        return all(self.bca.is_zero(x) for x in self.eps.values())

    def congruent(self, other: "CoeffField") -> bool:
        return self.bca == other.bca

    def __eq__(self, other):
        if not isinstance(other, CoeffField):
            return NotImplemented
        return self.bca == other.bca and all(
            self.bca.equal(self.eps[v], other.eps[v]) for v in self.eps)

    def __hash__(self):
        return hash(self.bca)

    def __str__(self):
        parts = []
        for v, x in self.eps.items():
            if not self.bca.is_zero(x):
                text = self.bca.format_element(x)
                sep = " - " if text.startswith("-") else " + "
                parts.append(f"{v} -> {v}{sep}{text.lstrip('-')}")
        return "sigma " + ("; ".join(parts) if parts else "canonical")

    def taylor(self) -> list:
        """Nonzero pairs (beta, eps^beta / beta!) as algebra elements, beta = 0 first."""
        if self._taylor is not None:
            return self._taylor
        A = self.bca
        vars = A.coeff_tlf.all_vars
        n = len(vars)
        out = []
        for total in range(A.top_degree + 1):
            found = False
            for beta in _compositions(total, n):
                x = A.one()
                for v, k in zip(vars, beta):
                    for _ in range(k):
                        x = A.mul(x, self.eps[v])
                if A.is_zero(x):
                    continue
                found = True
                f = 1
                for k in beta:
                    f *= factorial(k)
                if f != 1:
                    inv = A.coeff_tlf.coeff_field.one / f
                    x = [a * inv for a in x]
                out.append((beta, x))
            if total and not found:
                break
        self._taylor = out
        return out

    def apply(self, lam: Laurent) -> list:
        """sigma(lam) in A."""
        A = self.bca
        if lam.tlf != A.coeff_tlf:
            raise DescriptorMismatchError(f"{lam.tlf} vs {A.coeff_tlf}")
        names = A.coeff_tlf.all_vars
        out = A.zero()
        for beta, x in self.taylor():
            d = lam
            for name, k in zip(names, beta):
                for _ in range(k):
                    d = d.derive(name)
            if d.terms or d.window is not None:
                out = A.add(out, A.scale(x, d))
        return out

    def module_taylor(self, M) -> list:
        """[(beta, sparse K-matrix of eps^beta/beta! acting on M)] for beta != 0."""
        key = id(M)
        hit = self._module_cache.get(key)
        if hit is not None and hit[0] is M:
            return hit[1]
        out = []
        for beta, x in self.taylor():
            if not any(beta):
                continue
            mat = M.action_sparse(x)
            if mat:
                out.append((beta, mat))
        self._module_cache[key] = (M, out)
        return out


def sigma_apply(sigma: CoeffField, lam: Laurent) -> list:
    return sigma.apply(lam)


def _compositions(total: int, n: int):
    if n == 0:
        if total == 0:
            yield ()
        return
    if n == 1:
        yield (total,)
        return
    for k in range(total, -1, -1):
        for rest in _compositions(total - k, n - 1):
            yield (k,) + rest
