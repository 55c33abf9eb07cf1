"""Iterated Laurent series F((t_1, ..., t_n)) with per-variable precision windows.

Variables are ordered outermost first, so F((t_1, ..., t_n)) is
F((t_2, ..., t_n))((t_1)), and "lowest term" always means lexicographically
lowest on the exponent tuple (e_1, ..., e_n).

Precision model.  A window is a tuple of pairs ``(lo_i, hi_i)``:

* every coefficient at an exponent ``e`` with ``e_i <= hi_i`` for all i is
  exactly known (and stored when nonzero);
* ``lo_j`` bounds the j-th exponent from below over the true support
  restricted to the slab ``{e : e_i <= hi_i for i < j}``.

``hi_i`` may be ``INF``.  An element whose ``hi`` is infinite everywhere is
EXACT, stored with ``window = None``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DescriptorMismatchError, PrecisionError, UnknownVariableError
from .scalars import RatFunc, Scalar, ScalarField, algebraic_extension, rational_functions

INF = math.inf


def _fmt_bound(b):
    return "inf" if b == INF else int(b)


@dataclass(frozen=True)
class TlfDescriptor:
    """K = F((t_1, ..., t_n)) with a fixed parametrization."""

    coeff_field: ScalarField
    vars: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("Laurent variable names must be distinct")
        clash = set(self.vars) & set(self.coeff_field.names())
        if clash:
            raise ValueError(f"Laurent variables clash with coefficient names: {sorted(clash)}")

    @property
    def dim(self) -> int:
        return len(self.vars)

    @property
    def function_vars(self) -> tuple:
        return self.coeff_field.function_vars

    @property
    def all_vars(self) -> tuple:
        """Differential coordinates: Laurent variables, then function variables."""
        return self.vars + self.function_vars

    def index(self, var: str) -> int:
        try:
            return self.all_vars.index(var)
        except ValueError:
            raise UnknownVariableError(f"{var!r} is not a variable of {self}") from None

    def zero(self) -> "Laurent":
        return Laurent(self, {}, trusted=True)

    def one(self) -> "Laurent":
        return Laurent(self, {(0,) * self.dim: self.coeff_field.one}, trusted=True)

    def const(self, c) -> "Laurent":
        c = self.coeff_field.coerce(c)
        return Laurent(self, {(0,) * self.dim: c} if c else {}, trusted=True)

    def monomial(self, exps, c=1) -> "Laurent":
        c = self.coeff_field.coerce(c)
        return Laurent(self, {tuple(exps): c} if c else {}, trusted=True)

    def var(self, name: str) -> "Laurent":
        if name in self.vars:
            e = [0] * self.dim
            e[self.vars.index(name)] = 1
            return self.monomial(e)
        return self.const(self.coeff_field.gen(name))

    def __str__(self):
        if not self.vars:
            return str(self.coeff_field)
        return f"{self.coeff_field}(({','.join(self.vars)}))"


class Laurent:
    """A truncated element of an iterated Laurent series field."""

    __slots__ = ("tlf", "terms", "window")

    def __init__(self, tlf: TlfDescriptor, terms: dict, window=None, trusted: bool = False):
        if not trusted:
            F = tlf.coeff_field
            clean = {}
            for e, c in terms.items():
                e = tuple(int(k) for k in e)
                if len(e) != tlf.dim:
                    raise ValueError(f"exponent {e} has wrong length for {tlf}")
                c = F.coerce(c)
                if c:
                    clean[e] = clean[e] + c if e in clean else c
            terms = {e: c for e, c in clean.items() if c}
            if window is not None:
                window = tuple((lo, hi) for lo, hi in window)
                if len(window) != tlf.dim:
                    raise ValueError("window has wrong length")
                for e in terms:
                    for k, (lo, hi) in zip(e, window):
                        if k < lo:
                            raise ValueError(f"term {e} lies below the window floor")
                terms = {e: c for e, c in terms.items() if _inside(e, window)}
        if window is not None and all(hi == INF for _, hi in window):
            window = None
        self.tlf = tlf
        self.terms = terms
        self.window = window

    # -- construction helpers

    @classmethod
    def with_precision(cls, tlf: TlfDescriptor, terms: dict, hi) -> "Laurent":
        """Element known for exponents <= hi; floors taken from the stored terms."""
        x = cls(tlf, terms)
        hi = _as_bounds(hi, tlf.dim)
        return x.truncate(hi)

    # -- window bookkeeping

    @property
    def is_exact(self) -> bool:
        return self.window is None

    def floors(self) -> tuple:
        if self.window is not None:
            return tuple(lo for lo, _ in self.window)
        if not self.terms:
            return (INF,) * self.tlf.dim
        return tuple(min(e[i] for e in self.terms) for i in range(self.tlf.dim))

    def ceilings(self) -> tuple:
        if self.window is None:
            return (INF,) * self.tlf.dim
        return tuple(hi for _, hi in self.window)

    def box(self):
        return self.floors(), self.ceilings()

    def certified(self, e) -> bool:
        return self.window is None or all(k <= hi for k, (_, hi) in zip(e, self.window))

    def truncate(self, hi) -> "Laurent":
        hi = _as_bounds(hi, self.tlf.dim)
        lo, old = self.box()
        new = tuple(min(a, b) for a, b in zip(old, hi))
        window = tuple(zip(lo, new))
        terms = {e: c for e, c in self.terms.items() if _inside(e, window)}
        return Laurent(self.tlf, terms, window, trusted=True)

    # -- arithmetic

    def _check(self, other: "Laurent"):
        if other.tlf != self.tlf:
            raise DescriptorMismatchError(f"{self.tlf} vs {other.tlf}")

    def _lift(self, other):
        if isinstance(other, Laurent):
            self._check(other)
            return other
        if isinstance(other, Scalar):
            return self.tlf.const(other)
        return self.tlf.const(other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            if e in terms:
                s = terms[e] + c
                if s:
                    terms[e] = s
                else:
                    del terms[e]
            else:
                terms[e] = c
        if self.window is None and other.window is None:
            return Laurent(self.tlf, terms, trusted=True)
        lx, hx = self.box()
        ly, hy = other.box()
        window = tuple((min(a, b), min(c, d)) for a, b, c, d in zip(lx, ly, hx, hy))
        terms = {e: c for e, c in terms.items() if _inside(e, window)}
        return Laurent(self.tlf, terms, window, trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.tlf, {e: -c for e, c in self.terms.items()}, self.window, trusted=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            if isinstance(other, Scalar):
                other = other.value
            return self.scale(self.tlf.coeff_field.coerce(other))
        self._check(other)
        if self.window is None and other.window is None:
            terms = {}
            for ea, ca in self.terms.items():
                for eb, cb in other.terms.items():
                    e = tuple(a + b for a, b in zip(ea, eb))
                    p = ca * cb
                    if e in terms:
                        s = terms[e] + p
                        if s:
                            terms[e] = s
                        else:
                            del terms[e]
                    else:
                        terms[e] = p
            return Laurent(self.tlf, terms, trusted=True)
        lx, hx = self.box()
        ly, hy = other.box()
        hi = tuple(min(a + d, b + c) for a, b, c, d in zip(hx, hy, lx, ly))
        lo = tuple(a + b for a, b in zip(lx, ly))
        window = tuple(zip(lo, hi))
        terms = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(a + b for a, b in zip(ea, eb))
                if not all(k <= h for k, h in zip(e, hi)):
                    continue
                p = ca * cb
                if e in terms:
                    s = terms[e] + p
                    if s:
                        terms[e] = s
                    else:
                        del terms[e]
                else:
                    terms[e] = p
        return Laurent(self.tlf, terms, window, trusted=True)

    def __rmul__(self, other):
        return self * other

    def scale(self, c) -> "Laurent":
        if not c:
            return self.tlf.zero()
        return Laurent(self.tlf, {e: a * c for e, a in self.terms.items()}, self.window, trusted=True)

    def shift(self, exps, c=None) -> "Laurent":
        """Multiply by the monomial c * t^exps."""
        terms = {}
        for e, a in self.terms.items():
            terms[tuple(k + d for k, d in zip(e, exps))] = a if c is None else a * c
        window = None
        if self.window is not None:
            window = tuple((lo + d, hi + d) for (lo, hi), d in zip(self.window, exps))
        return Laurent(self.tlf, terms, window, trusted=True)

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        result = self.tlf.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Laurent):
            return self.tlf == other.tlf and self.terms == other.terms and self.window == other.window
        if isinstance(other, (int, Fraction, Scalar)):
            return self == self.tlf.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.tlf, frozenset(self.terms.items()), self.window))

    # -- calculus

    def derive(self, var: str) -> "Laurent":
        tlf = self.tlf
        if var in tlf.vars:
            j = tlf.vars.index(var)
            terms = {}
            for e, c in self.terms.items():
                if e[j]:
                    terms[e[:j] + (e[j] - 1,) + e[j + 1:]] = c * e[j]
            window = self.window
            if window is not None:
                window = tuple((lo - 1, hi - 1) if i == j else (lo, hi) for i, (lo, hi) in enumerate(window))
            return Laurent(tlf, terms, window, trusted=True)
        F = tlf.coeff_field
        if var not in F.function_vars:
            raise UnknownVariableError(f"{var!r} is not a variable of {tlf}")
        terms = {}
        for e, c in self.terms.items():
            d = F.derive(c, var)
            if d:
                terms[e] = d
        return Laurent(tlf, terms, self.window, trusted=True)

    # -- queries

    def coeff(self, e):
        """Raw coefficient at exponent ``e``; raises PrecisionError outside the window."""
        e = tuple(e)
        if not self.certified(e):
            raise PrecisionError(f"coefficient at {e} lies outside the certified window {self.window}")
        return self.terms.get(e, self.tlf.coeff_field.zero)

    def lowest(self):
        """(exponent, coefficient) of the lexicographically lowest stored term."""
        if not self.terms:
            raise ZeroDivisionError("zero element has no lowest term")
        e = min(self.terms)
        return e, self.terms[e]

    def agrees(self, other: "Laurent") -> bool:
        """Equality on the common certified window."""
        self._check(other)
        hi = tuple(min(a, b) for a, b in zip(self.ceilings(), other.ceilings()))
        keys = set(self.terms) | set(other.terms)
        zero = self.tlf.coeff_field.zero
        for e in keys:
            if all(k <= h for k, h in zip(e, hi)):
                if self.terms.get(e, zero) != other.terms.get(e, zero):
                    return False
        return True

    # -- inversion

    def invert(self, target=None) -> "Laurent":
        """Multiplicative inverse, certified up to ``target`` (exponent ceilings)."""
        if not self.terms:
            raise ZeroDivisionError("inverse of zero")
        n = self.tlf.dim
        F = self.tlf.coeff_field
        m, c = self.lowest()
        cinv = F.one / c
        neg_m = tuple(-k for k in m)
        if len(self.terms) == 1 and self.window is None:
            return Laurent(self.tlf, {neg_m: cinv}, trusted=True)
        z = self.shift(neg_m, cinv) - self.tlf.one()
        if self.window is not None:
            lo = self.floors()
            if any(a < b for a, b in zip(lo, m)):
                raise PrecisionError("window too small to certify the lowest term")
            ceiling = tuple(hi - k for hi, k in zip(self.ceilings(), m))
        else:
            ceiling = (INF,) * n
        if target is None:
            need = ceiling
        else:
            target = _as_bounds(target, n)
            need = tuple(min(t + k, h) for t, k, h in zip(target, m, ceiling))
        # classes: index of the first nonzero coordinate of each z-term
        cls = [[] for _ in range(n)]
        for w in z.terms:
            j = next(i for i, k in enumerate(w) if k)
            cls[j].append(w)
        width = [0] * n
        for w in z.terms:
            for i, k in enumerate(w):
                width[i] = max(width[i], -k)
        count = 0
        for j in range(n):
            if not cls[j]:
                continue
            if need[j] == INF:
                raise PrecisionError(f"a finite target is required in {self.tlf.vars[j]}")
            drop = max((-w[j] for i in range(j) for w in cls[i]), default=0)
            drop = max(drop, 0)
            count += max(0, int(need[j] + drop * count))
        region = tuple(h + count * d for h, d in zip(need, width))
        acc = self.tlf.one()
        one = self.tlf.one()
        for _ in range(count):
            acc = (one - z * acc).truncate(region)
        acc = acc.truncate(need)
        return acc.shift(neg_m, cinv)

    # -- output

    def __str__(self):
        return format_laurent(self)

    def __repr__(self):
        return f"Laurent({self.tlf}: {self})"

    def to_json(self):
        F = self.tlf.coeff_field
        return {
            "tlf": str(self.tlf),
            "terms": [[list(e), F.fmt(self.terms[e])] for e in sorted(self.terms)],
            "window": "EXACT" if self.window is None else [[_fmt_bound(lo), _fmt_bound(hi)] for lo, hi in self.window],
        }


def _inside(e, window) -> bool:
    return all(k <= hi for k, (_, hi) in zip(e, window))


def _as_bounds(hi, n: int) -> tuple:
    if isinstance(hi, (int, float)):
        return (hi,) * n
    hi = tuple(INF if h is None else h for h in hi)
    if len(hi) != n:
        raise ValueError("window has wrong length")
    return hi


def monomial_text(names, exps) -> str:
    parts = []
    for name, k in zip(names, exps):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_laurent(x: Laurent) -> str:
    F = x.tlf.coeff_field
    pieces = []
    for e in sorted(x.terms):
        c = x.terms[e]
        neg = F.is_negative(c)
        if neg:
            c = -c
        mono = monomial_text(x.tlf.vars, e)
        cs = F.fmt(c)
        if mono:
            if cs == "1":
                body = mono
            else:
                body = (f"({cs})" if F.is_sum(c) else cs) + "*" + mono
        else:
            body = f"({cs})" if (F.is_sum(c) and (pieces or neg)) else cs
        pieces.append((neg, body))
    if x.window is not None:
        for name, (_, hi) in zip(x.tlf.vars, x.window):
            if hi != INF:
                pieces.append((False, f"O({name}^{int(hi) + 1})"))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


def series_arith(x: Laurent, y: Laurent, op: str) -> Laurent:
    if x.tlf != y.tlf:
        raise DescriptorMismatchError(f"{x.tlf} vs {y.tlf}")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown operation {op!r}")


def series_invert(x: Laurent, target_window=None) -> Laurent:
    return x.invert(target_window)


def series_derive(x: Laurent, var: str) -> Laurent:
    return x.derive(var)


def coeff_at(x: Laurent, e) -> Scalar:
    return Scalar(x.tlf.coeff_field, x.coeff(e))


# -- rational expansion at the origin

def _remaining_field(F: ScalarField, promoted) -> ScalarField:
    rest = tuple(v for v in F.vars if v not in promoted)
    return rational_functions(F.base, rest) if rest else F.base


def _poly_to_laurent(poly, F: ScalarField, tlf: TlfDescriptor, promoted) -> Laurent:
    pos = [F.vars.index(v) for v in promoted]
    rest = [i for i in range(len(F.vars)) if F.vars[i] not in promoted]
    G = tlf.coeff_field
    groups = {}
    for monom, coeff in poly.terms():
        e = tuple(monom[i] for i in pos)
        r = tuple(monom[i] for i in rest)
        groups.setdefault(e, {})[r] = coeff
    terms = {}
    for e, d in groups.items():
        if G.kind == "rational_functions":
            terms[e] = RatFunc(G.ring.from_dict(d), G.ring.one, G, reduced=True)
        else:
            (coeff,) = d.values()
            terms[e] = F._ground_to_fraction(coeff)
    return Laurent(tlf, terms, trusted=True)


def expansion_tlf(F: ScalarField, at) -> TlfDescriptor:
    return TlfDescriptor(_remaining_field(F, at), tuple(at))


def expand_rational(a, field: ScalarField, at, window=None) -> Laurent:
    """Laurent expansion at the origin of a rational function in the variables ``at``.

    ``at`` lists the promoted variables outermost first; the result lives over
    F'((at)) where F' keeps the remaining function variables.
    """
    if field.kind != "rational_functions":
        raise ValueError("expansion needs a rational function field")
    at = tuple(at)
    for v in at:
        if v not in field.vars:
            raise UnknownVariableError(f"{v!r} is not a function variable of {field}")
    a = field.coerce(a)
    tlf = expansion_tlf(field, at)
    num = _poly_to_laurent(a.num, field, tlf, at)
    den = _poly_to_laurent(a.den, field, tlf, at)
    if len(den.terms) == 1:
        return num * den.invert()
    if window is None:
        raise PrecisionError("expansion of a non-monomial denominator needs a window")
    lo_num = num.floors()
    target = _as_bounds(window, len(at))
    # num * den^{-1} up to target: den^{-1} needed up to target - lowest(num)
    need = tuple(t - l for t, l in zip(target, lo_num))
    return (num * den.invert(need)).truncate(target)


# -- morphism steps

@dataclass(frozen=True)
class LaurentStep:
    """K -> K((u)): a new outermost variable."""

    source: TlfDescriptor
    var: str

    kind = "laurent_step"

    @property
    def target(self) -> TlfDescriptor:
        return TlfDescriptor(self.source.coeff_field, (self.var,) + self.source.vars)

    def __str__(self):
        return f"laurent {self.var}"


@dataclass(frozen=True)
class KummerStep:
    """Replace the Laurent variable ``var`` by ``new_var`` via var = new_var^e * g(new_var).

    ``g`` lists the coefficients of a polynomial unit, constant term first.
    """

    source: TlfDescriptor
    var: str
    new_var: str
    e: int
    g: tuple = (1,)

    kind = "kummer_step"

    def __post_init__(self):
        F = self.source.coeff_field
        object.__setattr__(self, "g", tuple(F.coerce(c) for c in self.g))
        if self.e < 1:
            raise ValueError("ramification index must be >= 1")
        if not self.g or not self.g[0]:
            raise ValueError("g must have an invertible constant term")
        if self.var not in self.source.vars:
            raise UnknownVariableError(f"{self.var!r} is not a Laurent variable of {self.source}")
        if not F.is_constant(self.g[0]) or any(not F.is_constant(c) for c in self.g):
            raise ValueError("g must have constant coefficients")

    @property
    def position(self) -> int:
        return self.source.vars.index(self.var)

    @property
    def target(self) -> TlfDescriptor:
        vars = list(self.source.vars)
        vars[self.position] = self.new_var
        return TlfDescriptor(self.source.coeff_field, tuple(vars))

    @property
    def is_pure(self) -> bool:
        return len([c for c in self.g if c]) == 1

    def g_series(self) -> Laurent:
        tgt = self.target
        j = self.position
        terms = {}
        for k, c in enumerate(self.g):
            if c:
                e = [0] * tgt.dim
                e[j] = k
                terms[tuple(e)] = c
        return Laurent(tgt, terms, trusted=True)

    def h_power(self, k: int, hi_u) -> Laurent:
        """(u^e g(u))^k, certified for u-exponents <= hi_u."""
        tgt = self.target
        j = self.position
        shift = [0] * tgt.dim
        shift[j] = self.e * k
        g = self.g_series()
        if k >= 0:
            return (g ** k).shift(shift)
        if len(g.terms) == 1:
            return (g.invert() ** (-k)).shift(shift)
        bound = [INF] * tgt.dim
        bound[j] = hi_u - self.e * k
        return (g ** (-k)).invert(tuple(bound)).shift(shift)

    def __str__(self):
        F = self.source.coeff_field
        gtext = " + ".join(f"{F.fmt(c)}*{self.new_var}^{k}" for k, c in enumerate(self.g) if c)
        return f"kummer {self.var} = {self.new_var}^{self.e}*({gtext})"


@dataclass(frozen=True)
class ConstFieldStep:
    """Coefficients extended from F to F[x]/(f)."""

    source: TlfDescriptor
    name: str
    minpoly: tuple

    kind = "constfield_step"

    @property
    def field(self) -> ScalarField:
        return algebraic_extension(self.source.coeff_field, self.name, self.minpoly)

    @property
    def target(self) -> TlfDescriptor:
        return TlfDescriptor(self.field, self.source.vars)

    def __str__(self):
        return f"constfield {self.field}"


def apply_step(x: Laurent, step, window=None) -> Laurent:
    """Image of ``x`` under one morphism step; ``window`` caps the new variable's precision."""
    if x.tlf != step.source:
        raise DescriptorMismatchError(f"step source {step.source} does not match {x.tlf}")
    tgt = step.target
    if step.kind == "laurent_step":
        terms = {(0,) + e: c for e, c in x.terms.items()}
        w = None if x.window is None else ((0, INF),) + x.window
        return Laurent(tgt, terms, w, trusted=True)
    if step.kind == "constfield_step":
        G = tgt.coeff_field
        return Laurent(tgt, {e: G.coerce(c) for e, c in x.terms.items()}, x.window, trusted=True)
    j = step.position
    lo, hi = x.box()
    hi_u = INF if hi[j] == INF else step.e * (hi[j] + 1) - 1
    if window is not None:
        hi_u = min(hi_u, window)
    if hi_u == INF and not step.is_pure:
        groups = {e[j] for e in x.terms}
        if any(k < 0 for k in groups):
            raise PrecisionError("substitution with a non-monomial unit needs a window")
    groups = {}
    for e, c in x.terms.items():
        groups.setdefault(e[j], {})[e[:j] + (0,) + e[j + 1:]] = c
    pw = None
    if x.window is not None:
        pw = tuple((0, INF) if i == j else b for i, b in enumerate(x.window))
    total = Laurent(tgt, {}, trusted=True)
    for k, d in sorted(groups.items()):
        part = Laurent(tgt, d, pw, trusted=True)
        total = total + part * step.h_power(k, hi_u)
    if x.window is not None:
        # unknown source terms only reach u-exponents above hi_u
        floors = list(total.floors())
        floors[j] = min(floors[j], step.e * lo[j]) if lo[j] != INF else floors[j]
        window = list(zip(floors, total.ceilings()))
        total = Laurent(tgt, total.terms, tuple(window), trusted=True)
    if hi_u != INF:
        bound = [INF] * tgt.dim
        bound[j] = hi_u
        total = total.truncate(tuple(bound))
    return total
