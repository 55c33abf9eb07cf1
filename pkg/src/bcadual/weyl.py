"""Continuous differential operators D(K) = K<d_1, ..., d_m>, normal-ordered.

An operator is a mapping from multi-indices over ``tlf.all_vars`` to
coefficients, meaning sum_b a_b d^b with every derivative to the right.
"""
from __future__ import annotations

from math import comb, factorial
from itertools import product

from .errors import DescriptorMismatchError
from .forms import Derivation, Form, lie_derivative
from .series import Laurent, TlfDescriptor, monomial_text


def _keep(a: Laurent) -> bool:
    return bool(a.terms) or a.window is not None


def _derive_multi(a: Laurent, beta, names) -> Laurent:
    for name, k in zip(names, beta):
        for _ in range(k):
            a = a.derive(name)
    return a


class DiffOp:
    __slots__ = ("tlf", "terms")

    def __init__(self, tlf: TlfDescriptor, terms: dict, trusted: bool = False):
        if trusted:
            # caller guarantees valid multi-indices over tlf
            self.tlf = tlf
            self.terms = {b: a for b, a in terms.items() if _keep(a)}
            return
        n = len(tlf.all_vars)
        clean = {}
        for b, a in terms.items():
            b = tuple(b)
            if len(b) != n or min(b, default=0) < 0:
                raise ValueError(f"bad multi-index {b}")
            if a.tlf != tlf:
                raise DescriptorMismatchError(f"{a.tlf} vs {tlf}")
            if _keep(a):
                clean[b] = a
        self.tlf = tlf
        self.terms = clean

    # -- constructors

    @classmethod
    def zero(cls, tlf: TlfDescriptor) -> "DiffOp":
        return cls(tlf, {})

    @classmethod
    def scalar(cls, a: Laurent) -> "DiffOp":
        return cls(a.tlf, {(0,) * len(a.tlf.all_vars): a})

    @classmethod
    def identity(cls, tlf: TlfDescriptor) -> "DiffOp":
        return cls.scalar(tlf.one())

    @classmethod
    def partial(cls, tlf: TlfDescriptor, var: str, k: int = 1) -> "DiffOp":
        b = [0] * len(tlf.all_vars)
        b[tlf.index(var)] = k
        return cls(tlf, {tuple(b): tlf.one()})

    @classmethod
    def monomial(cls, tlf: TlfDescriptor, beta, a: Laurent | None = None) -> "DiffOp":
        return cls(tlf, {tuple(beta): tlf.one() if a is None else a})

    @classmethod
    def from_derivation(cls, der: Derivation) -> "DiffOp":
        n = len(der.tlf.all_vars)
        terms = {}
        for i, a in der.coeffs.items():
            b = [0] * n
            b[i] = 1
            terms[tuple(b)] = a
        return cls(der.tlf, terms)

    # -- ring structure

    def _check(self, other: "DiffOp"):
        if other.tlf != self.tlf:
            raise DescriptorMismatchError(f"{self.tlf} vs {other.tlf}")

    def _lift(self, other) -> "DiffOp":
        if isinstance(other, DiffOp):
            self._check(other)
            return other
        if isinstance(other, Laurent):
            return DiffOp.scalar(other)
        return DiffOp.scalar(self.tlf.const(other))

    def __add__(self, other) -> "DiffOp":
        other = self._lift(other)
        terms = dict(self.terms)
        for b, a in other.terms.items():
            terms[b] = terms[b] + a if b in terms else a
        return DiffOp(self.tlf, terms, trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.tlf, {b: -a for b, a in self.terms.items()}, trusted=True)

    def __sub__(self, other) -> "DiffOp":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "DiffOp":
        return self._lift(other) - self

    def scale(self, f) -> "DiffOp":
        """Left multiplication by a function."""
        return DiffOp(self.tlf, {b: f * a for b, a in self.terms.items()}, trusted=True)

    def __mul__(self, other) -> "DiffOp":
        return do_mul(self, self._lift(other))

    def __rmul__(self, other) -> "DiffOp":
        return do_mul(self._lift(other), self)

    def __call__(self, a: Laurent) -> Laurent:
        return do_apply(self, a)

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.tlf == other.tlf and self.terms == other.terms

    def __hash__(self):
        return hash((self.tlf, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return all(not a.terms for a in self.terms.values())

    def agrees(self, other: "DiffOp") -> bool:
        self._check(other)
        zero = self.tlf.zero()
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(b, zero).agrees(other.terms.get(b, zero)) for b in keys)

    @property
    def order(self) -> int:
        return do_order(self)

    def __str__(self):
        names = ["D" + v for v in self.tlf.all_vars]
        pieces = []
        for b in sorted(self.terms, key=lambda b: (sum(b), tuple(-k for k in b))):
            a = self.terms[b]
            text = str(a)
            mono = monomial_text(names, b)
            if not mono:
                pieces.append(text if len(a.terms) <= 1 and a.window is None or not pieces else f"({text})")
            elif text == "1":
                pieces.append(mono)
            elif text == "-1":
                pieces.append("-" + mono)
            elif len(a.terms) == 1 and a.window is None and " " not in text:
                pieces.append(f"{text}*{mono}")
            else:
                pieces.append(f"({text})*{mono}")
        if not pieces:
            return "0"
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"DiffOp({self.tlf}: {self})"

    def to_json(self):
        return {
            "tlf": str(self.tlf),
            "terms": [[list(b), self.terms[b].to_json()] for b in sorted(self.terms)],
        }


def do_apply(D: DiffOp, a: Laurent) -> Laurent:
    if a.tlf != D.tlf:
        raise DescriptorMismatchError(f"{a.tlf} vs {D.tlf}")
    names = D.tlf.all_vars
    out = D.tlf.zero()
    for b, c in D.terms.items():
        out = out + c * _derive_multi(a, b, names)
    return out


def do_mul(D: DiffOp, E: DiffOp) -> DiffOp:
    """Normal-ordered product: (a d^b)(c d^g) = sum_{d<=b} C(b,d) a d^d(c) d^(b-d+g)."""
    D._check(E)
    names = D.tlf.all_vars
    terms = {}
    derivs = [{} for _ in E.terms]
    for beta, a in D.terms.items():
        unit = _is_one(a)
        deltas = list(product(*[range(k + 1) for k in beta]))
        for (gamma, c), cache in zip(E.terms.items(), derivs):
            for delta in deltas:
                dc = _derivative(c, delta, names, cache)
                if not _keep(dc):
                    continue
                coef = 1
                for bk, dk in zip(beta, delta):
                    coef *= comb(bk, dk)
                idx = tuple(bk - dk + gk for bk, dk, gk in zip(beta, delta, gamma))
                t = dc if unit else a * dc
                if coef != 1:
                    t = t * coef
                terms[idx] = terms[idx] + t if idx in terms else t
    return DiffOp(D.tlf, terms, trusted=True)


def _is_one(a: Laurent) -> bool:
    if a.window is not None or len(a.terms) != 1:
        return False
    (e, c), = a.terms.items()
    return not any(e) and c == a.tlf.coeff_field.one


def _derivative(c: Laurent, delta, names, cache: dict) -> Laurent:
    """d^delta(c), reusing lower derivatives stored in ``cache``."""
    if not any(delta):
        return c
    hit = cache.get(delta)
    if hit is None:
        k = max(i for i, d in enumerate(delta) if d)
        lower = delta[:k] + (delta[k] - 1,) + delta[k + 1:]
        hit = cache[delta] = _derivative(c, lower, names, cache).derive(names[k])
    return hit


def do_order(D: DiffOp) -> int:
    """Order from the normal form; the zero operator has order -1."""
    orders = [sum(b) for b, a in D.terms.items() if a.terms]
    return max(orders, default=-1)


def commutator(D: DiffOp, E: DiffOp) -> DiffOp:
    return do_mul(D, E) - do_mul(E, D)


def commutator_order_check(D: DiffOp, elements) -> bool:
    """[[...[D, a_0], ...], a_n] == 0 for multiplication operators a_i."""
    C = D
    for a in elements:
        C = commutator(C, DiffOp.scalar(a) if isinstance(a, Laurent) else a)
    return C.is_zero()


def transpose(D: DiffOp) -> DiffOp:
    """sum a_b d^b  ->  sum (-1)^|b| d^b . a_b, normal-ordered."""
    names = D.tlf.all_vars
    terms = {}
    for beta, a in D.terms.items():
        sign = -1 if sum(beta) % 2 else 1
        for delta in product(*[range(k + 1) for k in beta]):
            da = _derive_multi(a, delta, names)
            if not _keep(da):
                continue
            coef = sign
            for bk, dk in zip(beta, delta):
                coef *= comb(bk, dk)
            idx = tuple(bk - dk for bk, dk in zip(beta, delta))
            t = da * coef
            terms[idx] = terms[idx] + t if idx in terms else t
    return DiffOp(D.tlf, terms)


def right_action(alpha: Form, D: DiffOp) -> Form:
    """alpha * D = sum (-1)^|b| L^b(a_b alpha), with coordinate Lie derivatives."""
    if alpha.tlf != D.tlf:
        raise DescriptorMismatchError(f"{alpha.tlf} vs {D.tlf}")
    if not alpha.is_top:
        raise ValueError("the right action is defined on top forms")
    tlf = alpha.tlf
    partials = [Derivation.partial(tlf, v) for v in tlf.all_vars]
    out = Form.zero(tlf, alpha.degree)
    for beta, a in D.terms.items():
        piece = alpha.scale(a)
        for i, k in enumerate(beta):
            for _ in range(k):
                piece = lie_derivative(partials[i], piece)
        out = out - piece if sum(beta) % 2 else out + piece
    return out


def right_action_coeff(f: Laurent, D: DiffOp) -> Laurent:
    """Coefficient of (f w0) * D in the trivialization w0 = dt_1 ^ ... ^ du_m."""
    names = f.tlf.all_vars
    out = f.tlf.zero()
    for beta, a in D.terms.items():
        piece = _derive_multi(a * f, beta, names)
        out = out - piece if sum(beta) % 2 else out + piece
    return out


def taylor_coefficient(beta) -> int:
    """beta! = prod beta_i!."""
    out = 1
    for k in beta:
        out *= factorial(k)
    return out


class DiffOpMatrix:
    """Rectangular matrix of operators over a common descriptor."""

    __slots__ = ("tlf", "rows")

    def __init__(self, tlf: TlfDescriptor, rows):
        rows = [list(r) for r in rows]
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("operator matrix must be rectangular")
        for r in rows:
            for D in r:
                if D.tlf != tlf:
                    raise DescriptorMismatchError(f"{D.tlf} vs {tlf}")
        self.tlf = tlf
        self.rows = rows

    @property
    def shape(self):
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def identity(cls, tlf: TlfDescriptor, n: int) -> "DiffOpMatrix":
        return cls(tlf, [[DiffOp.identity(tlf) if i == j else DiffOp.zero(tlf) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, tlf: TlfDescriptor, m: int, n: int) -> "DiffOpMatrix":
        return cls(tlf, [[DiffOp.zero(tlf) for _ in range(n)] for _ in range(m)])

    @classmethod
    def from_scalars(cls, tlf: TlfDescriptor, rows) -> "DiffOpMatrix":
        return cls(tlf, [[DiffOp.scalar(a) for a in r] for r in rows])

    def compose(self, other: "DiffOpMatrix") -> "DiffOpMatrix":
        """Matrix product self . other (apply ``other`` first)."""
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise ValueError("shape mismatch in operator matrix product")
        out = []
        for i in range(m):
            row = []
            for j in range(n):
                acc = DiffOp.zero(self.tlf)
                for l in range(k):
                    A, B = self.rows[i][l], other.rows[l][j]
                    if A.terms and B.terms:
                        acc = acc + do_mul(A, B)
                row.append(acc)
            out.append(row)
        return DiffOpMatrix(self.tlf, out)

    def apply(self, vec) -> list:
        m, n = self.shape
        if len(vec) != n:
            raise ValueError("vector length mismatch")
        out = []
        for i in range(m):
            acc = self.tlf.zero()
            for j in range(n):
                if self.rows[i][j].terms:
                    acc = acc + do_apply(self.rows[i][j], vec[j])
            out.append(acc)
        return out

    def __add__(self, other: "DiffOpMatrix") -> "DiffOpMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return DiffOpMatrix(self.tlf, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "DiffOpMatrix") -> "DiffOpMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return DiffOpMatrix(self.tlf, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __eq__(self, other):
        if not isinstance(other, DiffOpMatrix):
            return NotImplemented
        return self.tlf == other.tlf and self.rows == other.rows

    def agrees(self, other: "DiffOpMatrix") -> bool:
        return self.shape == other.shape and all(
            a.agrees(b) for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def is_zero(self) -> bool:
        return all(D.is_zero() for r in self.rows for D in r)

    def max_order(self) -> int:
        return max((do_order(D) for r in self.rows for D in r), default=-1)

    def __str__(self):
        return "[" + ",\n ".join("[" + ", ".join(str(D) for D in r) + "]" for r in self.rows) + "]"

    def to_json(self):
        return {"tlf": str(self.tlf), "rows": [[D.to_json() for D in r] for r in self.rows]}
