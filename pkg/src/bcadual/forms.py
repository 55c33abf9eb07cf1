"""Separated differential forms over a TLF, Cartan calculus and residues.

The differential basis is ``dv`` for v in ``tlf.all_vars`` (Laurent variables
outermost first, then function variables).  A component key is the sorted
tuple of variable indices.  Residues peel the outermost differential first and
are normalized by Res(u^-1 du) = 1.
"""
from __future__ import annotations

from .errors import DescriptorMismatchError, PrecisionError, UnsupportedShapeError
from .series import INF, Laurent, TlfDescriptor


def _sort_sign(key):
    """(sign, sorted key) for a wedge of basis differentials; sign 0 on repeats."""
    key = list(key)
    if len(set(key)) != len(key):
        return 0, None
    sign = 1
    for i in range(len(key)):
        for j in range(len(key) - 1 - i):
            if key[j] > key[j + 1]:
                key[j], key[j + 1] = key[j + 1], key[j]
                sign = -sign
    return sign, tuple(key)


class Form:
    __slots__ = ("tlf", "degree", "components")

    def __init__(self, tlf: TlfDescriptor, degree: int, components: dict):
        n = len(tlf.all_vars)
        if not 0 <= degree <= n:
            raise ValueError(f"degree {degree} out of range for {tlf}")
        clean = {}
        for k, a in components.items():
            k = tuple(k)
            if len(k) != degree or list(k) != sorted(set(k)):
                raise ValueError(f"malformed component key {k}")
            if a.tlf != tlf:
                raise DescriptorMismatchError(f"{a.tlf} vs {tlf}")
            if a.terms or a.window is not None:
                clean[k] = a
        self.tlf = tlf
        self.degree = degree
        self.components = clean

    # -- constructors

    @classmethod
    def zero(cls, tlf: TlfDescriptor, degree: int) -> "Form":
        return cls(tlf, degree, {})

    @classmethod
    def function(cls, a: Laurent) -> "Form":
        return cls(a.tlf, 0, {(): a})

    @classmethod
    def differential(cls, tlf: TlfDescriptor, var: str) -> "Form":
        return cls(tlf, 1, {(tlf.index(var),): tlf.one()})

    @classmethod
    def top(cls, a: Laurent) -> "Form":
        n = len(a.tlf.all_vars)
        return cls(a.tlf, n, {tuple(range(n)): a})

    # -- structure

    @property
    def is_top(self) -> bool:
        return self.degree == len(self.tlf.all_vars)

    def coefficient(self, key=None) -> Laurent:
        if key is None:
            if not self.is_top:
                raise ValueError("coefficient() without a key needs a top form")
            key = tuple(range(self.degree))
        return self.components.get(tuple(key), self.tlf.zero())

    def top_coeff(self) -> Laurent:
        return self.coefficient()

    def _check(self, other: "Form"):
        if other.tlf != self.tlf:
            raise DescriptorMismatchError(f"{self.tlf} vs {other.tlf}")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degrees")
        comps = dict(self.components)
        for k, a in other.components.items():
            comps[k] = comps[k] + a if k in comps else a
        return Form(self.tlf, self.degree, comps)

    def __neg__(self) -> "Form":
        return Form(self.tlf, self.degree, {k: -a for k, a in self.components.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, f) -> "Form":
        """Multiply by a function (Laurent element or scalar)."""
        return Form(self.tlf, self.degree, {k: a * f for k, a in self.components.items()})

    def __mul__(self, f):
        if isinstance(f, Form):
            return wedge(self, f)
        return self.scale(f)

    def __rmul__(self, f):
        return self.scale(f)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.tlf == other.tlf and self.degree == other.degree and self.components == other.components

    def __hash__(self):
        return hash((self.tlf, self.degree, frozenset(self.components.items())))

    def is_zero(self) -> bool:
        return all(not a.terms for a in self.components.values())

    def agrees(self, other: "Form") -> bool:
        self._check(other)
        if self.degree != other.degree:
            return False
        zero = self.tlf.zero()
        keys = set(self.components) | set(other.components)
        return all(self.components.get(k, zero).agrees(other.components.get(k, zero)) for k in keys)

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"Form({self.tlf}: {self})"

    def to_json(self):
        names = self.tlf.all_vars
        return {
            "tlf": str(self.tlf),
            "degree": self.degree,
            "components": [[[names[i] for i in k], self.components[k].to_json()] for k in sorted(self.components)],
        }


def format_form(alpha: Form) -> str:
    names = alpha.tlf.all_vars
    pieces = []
    for k in sorted(alpha.components):
        a = alpha.components[k]
        text = str(a)
        if not k:
            pieces.append(text)
            continue
        basis = "^".join("d" + names[i] for i in k)
        if text == "1":
            pieces.append(basis)
        elif text == "-1":
            pieces.append("-" + basis)
        elif len(a.terms) == 1 and a.window is None and not _needs_parens(text):
            pieces.append(f"{text}*{basis}")
        else:
            pieces.append(f"({text})*{basis}")
    if not pieces:
        return "0"
    out = pieces[0]
    for p in pieces[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def _needs_parens(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > 0 and text[i - 1] == " ":
            return True
    return False


class Derivation:
    """A continuous derivation sum_v a_v d/dv."""

    __slots__ = ("tlf", "coeffs")

    def __init__(self, tlf: TlfDescriptor, coeffs: dict):
        clean = {}
        for v, a in coeffs.items():
            i = v if isinstance(v, int) else tlf.index(v)
            if a.tlf != tlf:
                raise DescriptorMismatchError(f"{a.tlf} vs {tlf}")
            if a.terms or a.window is not None:
                clean[i] = a
        self.tlf = tlf
        self.coeffs = clean

    @classmethod
    def partial(cls, tlf: TlfDescriptor, var: str) -> "Derivation":
        return cls(tlf, {tlf.index(var): tlf.one()})

    def __call__(self, x: Laurent) -> Laurent:
        out = self.tlf.zero()
        names = self.tlf.all_vars
        for i, a in self.coeffs.items():
            out = out + a * x.derive(names[i])
        return out

    def scale(self, f: Laurent) -> "Derivation":
        return Derivation(self.tlf, {i: f * a for i, a in self.coeffs.items()})

    def __add__(self, other: "Derivation") -> "Derivation":
        coeffs = dict(self.coeffs)
        for i, a in other.coeffs.items():
            coeffs[i] = coeffs[i] + a if i in coeffs else a
        return Derivation(self.tlf, coeffs)

    def __str__(self):
        names = self.tlf.all_vars
        return " + ".join(f"({self.coeffs[i]})*D{names[i]}" for i in sorted(self.coeffs)) or "0"


def bracket(d1: Derivation, d2: Derivation) -> Derivation:
    """[d1, d2] = d1 d2 - d2 d1."""
    names = d1.tlf.all_vars
    coeffs = {}
    for i in range(len(names)):
        xi = d1.tlf.var(names[i])
        c = d1(d2(xi)) - d2(d1(xi))
        if c.terms or c.window is not None:
            coeffs[i] = c
    return Derivation(d1.tlf, coeffs)


def wedge(alpha: Form, beta: Form) -> Form:
    alpha._check(beta)
    if alpha.degree + beta.degree > len(alpha.tlf.all_vars):
        return Form.zero(alpha.tlf, len(alpha.tlf.all_vars))
    comps = {}
    for ka, a in alpha.components.items():
        for kb, b in beta.components.items():
            sign, key = _sort_sign(ka + kb)
            if not sign:
                continue
            p = a * b
            if sign < 0:
                p = -p
            comps[key] = comps[key] + p if key in comps else p
    return Form(alpha.tlf, alpha.degree + beta.degree, comps)


def exterior_d(alpha: Form) -> Form:
    tlf = alpha.tlf
    n = len(tlf.all_vars)
    if alpha.degree >= n:
        return Form.zero(tlf, n) if alpha.degree == n else alpha
    comps = {}
    names = tlf.all_vars
    for k, a in alpha.components.items():
        for v in range(n):
            if v in k:
                continue
            da = a.derive(names[v])
            if not da.terms and da.window is None:
                continue
            sign, key = _sort_sign((v,) + k)
            if sign < 0:
                da = -da
            comps[key] = comps[key] + da if key in comps else da
    return Form(tlf, alpha.degree + 1, comps)


def contract(der: Derivation, alpha: Form) -> Form:
    """Interior product; the sign of removing position p is (-1)^p."""
    if der.tlf != alpha.tlf:
        raise DescriptorMismatchError(f"{der.tlf} vs {alpha.tlf}")
    if alpha.degree == 0:
        return Form.zero(alpha.tlf, 0)
    comps = {}
    for k, a in alpha.components.items():
        for p, v in enumerate(k):
            c = der.coeffs.get(v)
            if c is None:
                continue
            term = a * c
            if p % 2:
                term = -term
            key = k[:p] + k[p + 1:]
            comps[key] = comps[key] + term if key in comps else term
    return Form(alpha.tlf, alpha.degree - 1, comps)


def lie_derivative(der: Derivation, alpha: Form) -> Form:
    """L = contract . d + d . contract."""
    if alpha.degree == 0:
        return Form.function(der(alpha.coefficient(())))
    out = exterior_d(contract(der, alpha))
    if not alpha.is_top:
        out = out + contract(der, exterior_d(alpha))
    return out


# -- residues and traces

def _reduce_tlf(tlf: TlfDescriptor, j: int) -> TlfDescriptor:
    return TlfDescriptor(tlf.coeff_field, tlf.vars[:j] + tlf.vars[j + 1:])


def _drop(x: Laurent, tlf: TlfDescriptor, j: int, k: int) -> Laurent:
    """Coefficient of the j-th variable to the power k, as an element over ``tlf``."""
    if x.window is not None and k > x.window[j][1]:
        raise PrecisionError(
            f"coefficient of {x.tlf.vars[j]}^{k} is not certified by the window {x.window}")
    terms = {e[:j] + e[j + 1:]: c for e, c in x.terms.items() if e[j] == k}
    window = None
    if x.window is not None:
        window = x.window[:j] + x.window[j + 1:]
    return Laurent(tlf, terms, window, trusted=True)


def kummer_reduce(c: Laurent, step, window=None) -> list:
    """Write c = sum_{r<e} c_r u^r with each c_r over the step's source field."""
    K = step.source
    j = step.position
    e = step.e
    g0 = step.g[0]
    lo, hi = c.box()
    hi_u = hi[j] if window is None else min(hi[j], window)
    parts = [{} for _ in range(e)]
    if step.is_pure:
        # u^(qe+r) = (t/g0)^q u^r
        for x, a in c.terms.items():
            if x[j] > hi_u:
                continue
            q, r = divmod(x[j], e)
            parts[r][x[:j] + (q,) + x[j + 1:]] = a / g0 ** q
    else:
        if hi_u == INF:
            raise PrecisionError("basis reduction with a non-monomial unit needs a window")
        bound = tuple(hi_u if i == j else INF for i in range(c.tlf.dim))
        rest = c.truncate(bound)
        while rest.terms:
            n = min(x[j] for x in rest.terms)
            q, r = divmod(n, e)
            scale = 1 / g0 ** q
            layer = {x[:j] + (0,) + x[j + 1:]: a for x, a in rest.terms.items() if x[j] == n}
            for x, a in layer.items():
                parts[r][x[:j] + (q,) + x[j + 1:]] = a * scale
            shift = [r if i == j else 0 for i in range(c.tlf.dim)]
            sub = Laurent(c.tlf, layer, trusted=True).shift(shift, scale) * step.h_power(q, hi_u - r)
            rest = (rest - sub).truncate(bound)
    out = []
    for r in range(e):
        qhi = INF if hi_u == INF else (hi_u - r) // e
        qlo = INF if lo[j] == INF else (lo[j] - r) // e
        w = tuple((qlo, qhi) if i == j else (lo[i], hi[i]) for i in range(K.dim))
        out.append(Laurent(K, parts[r], w, trusted=True))
    return out


def kummer_trace(c: Laurent, step, window=None) -> Laurent:
    """Tr_{L/K}(c) for the Kummer step L/K: the trace of multiplication by c."""
    j = step.position
    total = step.source.zero()
    for i in range(step.e):
        shift = [0] * c.tlf.dim
        shift[j] = i
        w = None if window is None else window + i
        total = total + kummer_reduce(c.shift(shift), step, w)[i]
    return total


def res_step(alpha: Form, step, window=None) -> Form:
    """Res_{L/K} for one morphism step L/K; ``alpha`` is a top form over L."""
    if alpha.tlf != step.target:
        raise DescriptorMismatchError(f"{alpha.tlf} is not the target {step.target} of the step")
    if not alpha.is_top:
        raise ValueError("residues are defined on top forms")
    K = step.source
    b = alpha.top_coeff()
    if step.kind == "laurent_step":
        return Form.top(_drop(b, K, 0, -1))
    if step.kind == "constfield_step":
        G = step.target.coeff_field
        terms = {}
        for e, c in b.terms.items():
            t = G.trace(c)
            if t:
                terms[e] = t
        return Form.top(Laurent(K, terms, b.window, trusted=True))
    if step.kind == "kummer_step":
        j = step.position
        L = step.target
        h = step.g_series().shift([step.e if i == j else 0 for i in range(L.dim)])
        dh = h.derive(step.new_var)
        if len(dh.terms) == 1:
            c = b * dh.invert()
        else:
            hi = list(b.ceilings())
            if window is not None:
                hi[j] = min(hi[j], window)
            if hi[j] == INF:
                raise PrecisionError("Kummer residue with a non-monomial unit needs a window")
            lo_b = b.floors()[j] if b.terms or b.window else 0
            need = [INF] * L.dim
            need[j] = hi[j] - (lo_b if lo_b != INF else 0)
            c = (b * dh.invert(tuple(need))).truncate(tuple(hi))
        return Form.top(kummer_trace(c, step))
    raise UnsupportedShapeError(f"unknown step kind {step.kind!r}")


def res_tower(alpha: Form, tower, window=None) -> Form:
    """Compose ``res_step`` along ``tower`` (listed from the bottom), innermost step first."""
    for step in reversed(list(tower)):
        alpha = res_step(alpha, step, window)
    return alpha


def residue(alpha: Form) -> Form:
    """Res_{K/F}: peel every Laurent variable; the result is a top form over F."""
    tlf = alpha.tlf
    if not alpha.is_top:
        raise ValueError("residues are defined on top forms")
    a = alpha.top_coeff()
    e = (-1,) * tlf.dim
    if not a.certified(e):
        raise PrecisionError(f"residue coefficient {e} is not certified by the window {a.window}")
    base = TlfDescriptor(tlf.coeff_field, ())
    c = a.terms.get(e)
    return Form.top(Laurent(base, {(): c} if c else {}, trusted=True))


def residue_scalar(alpha: Form):
    """Res_{K/F} as a raw coefficient (the ds-part is dropped)."""
    return residue(alpha).top_coeff().terms.get((), alpha.tlf.coeff_field.zero)
