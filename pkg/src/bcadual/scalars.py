"""Exact coefficient fields.

Four kinds are supported: the rationals, prime fields F_p, rational function
fields k(u_1, ..., u_m) over one of those, and monogenic algebraic extensions
F[x]/(f) of any of the above (used only by constant-field steps).

Raw values are plain Python objects that support ``+ - * /``, unary minus,
``bool`` and ``==``:

* rationals: ``fractions.Fraction``
* prime fields: :class:`Mod`
* rational functions: :class:`RatFunc`
* algebraic extensions: :class:`AlgElt`

The series layer works with raw values directly.  :class:`Scalar` is the
immutable, field-tagged wrapper used at API boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from sympy.polys.domains import GF, QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from .errors import FieldMismatchError, UnknownVariableError

_PRIME_LIMIT = 2 ** 31


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


class Mod:
    """Residue class modulo a prime."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise FieldMismatchError(f"F_{self.p} vs F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(o - self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Mod(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Mod(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return Mod(-self.v, self.p)

    def __pow__(self, n: int):
        if n < 0:
            if self.v == 0:
                raise ZeroDivisionError("division by zero in F_%d" % self.p)
            return Mod(pow(pow(self.v, -1, self.p), -n, self.p), self.p)
        return Mod(pow(self.v, n, self.p), self.p)

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.p == other.p and self.v == other.v
        if isinstance(other, (int, Fraction)):
            o = self._lift(other)
            return (self.v - o) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return f"Mod({self.v}, {self.p})"


def _poly_text(poly, ring, ground_fmt) -> str:
    """Render a sympy polynomial as ``2*s^2*u - 3*s + 1`` (grlex descending)."""
    names = [str(g) for g in ring.symbols]
    pieces = []
    for monom, coeff in sorted(poly.terms(), key=lambda mc: (sum(mc[0]), mc[0]), reverse=True):
        c = ground_fmt(coeff)
        neg = c.startswith("-")
        if neg:
            c = c[1:]
        factors = []
        for name, k in zip(names, monom):
            if k == 1:
                factors.append(name)
            elif k:
                factors.append(f"{name}^{k}")
        if factors:
            body = "*".join(factors) if c == "1" else c + "*" + "*".join(factors)
        else:
            body = c
        pieces.append((neg, body))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


class RatFunc:
    """Reduced quotient of polynomials with a monic (grlex) denominator."""

    __slots__ = ("num", "den", "field")

    def __init__(self, num, den, field: "ScalarField", reduced: bool = False):
        if not reduced:
            if not den:
                raise ZeroDivisionError("zero denominator")
            if not num:
                den = field.ring.one
            elif den != 1:
                g = num.gcd(den)
                if g != 1:
                    num = num.exquo(g)
                    den = den.exquo(g)
                lc = den.LC
                if lc != 1:
                    num = num.mul_ground(field.ring.domain.one / lc)
                    den = den.monic()
        self.num = num
        self.den = den
        self.field = field

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other
        try:
            return self.field.coerce(other)
        except (TypeError, FieldMismatchError):
            return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == 1 and o.den == 1:
            return RatFunc(self.num + o.num, self.den, self.field, reduced=True)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den, self.field)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den, self.field)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, self.field, reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == 1 and o.den == 1:
            return RatFunc(self.num * o.num, self.den, self.field, reduced=True)
        return RatFunc(self.num * o.num, self.den * o.den, self.field)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.den, self.num, self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num ** n, self.den ** n, self.field, reduced=True)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.field == other.field and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, Mod)):
            o = self._coerce(other)
            if o is NotImplemented:
                return False
            return self.num == o.num and self.den == o.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self.field.fmt(self)})"


class AlgElt:
    """Element of F[x]/(f), stored as its coefficient tuple in 1, x, ..., x^(n-1)."""

    __slots__ = ("c", "field")

    def __init__(self, c: tuple, field: "ScalarField"):
        self.c = c
        self.field = field

    def _coerce(self, other):
        if isinstance(other, AlgElt):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other
        try:
            return self.field.coerce(other)
        except (TypeError, FieldMismatchError):
            return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgElt(tuple(a + b for a, b in zip(self.c, o.c)), self.field)

    __radd__ = __add__

    def __neg__(self):
        return AlgElt(tuple(-a for a in self.c), self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgElt(tuple(a - b for a, b in zip(self.c, o.c)), self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgElt(self.field._alg_mul(self.c, o.c), self.field)

    __rmul__ = __mul__

    def inverse(self):
        return AlgElt(self.field._alg_inv(self.c), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return any(self.c)

    def __eq__(self, other):
        if isinstance(other, AlgElt):
            return self.field == other.field and self.c == other.c
        if isinstance(other, (int, Fraction, Mod, RatFunc)):
            o = self._coerce(other)
            return o is not NotImplemented and self.c == o.c
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"AlgElt({self.field.fmt(self)})"


# -- univariate polynomials over a base field, as coefficient lists (low first)

def _trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _udivmod(a: list, b: list, zero):
    a = list(a)
    q = [zero] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        k = len(a) - len(b)
        c = a[-1] / lead
        q[k] = c
        for i, bc in enumerate(b):
            a[i + k] = a[i + k] - c * bc
        a.pop()
    return _trim(q), a


def _umul(a: list, b: list, zero) -> list:
    if not a or not b:
        return []
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return _trim(out)


def _usub(a: list, b: list, zero) -> list:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else zero) - (b[i] if i < len(b) else zero) for i in range(n)])


def _ugcdex(a: list, b: list, zero, one):
    """Return (g, s) with s*a = g mod b, g = gcd(a, b)."""
    r0, r1 = _trim(list(a)), _trim(list(b))
    s0, s1 = [one], []
    while r1:
        q, r = _udivmod(r0, r1, zero)
        r0, r1 = r1, r
        s0, s1 = s1, _usub(s0, _umul(q, s1, zero), zero)
    return r0, s0


@dataclass(frozen=True)
class ScalarField:
    """A coefficient field.  Build instances with the module-level constructors."""

    kind: str
    p: int = 0
    base: "ScalarField | None" = None
    vars: tuple = ()
    alg_name: str = ""
    minpoly: tuple = ()

    def __post_init__(self):
        if self.kind == "prime_field":
            if not _is_prime(self.p) or self.p >= _PRIME_LIMIT:
                raise ValueError(f"prime field needs a prime p < 2^31, got {self.p}")
        elif self.kind == "rational_functions":
            if self.base is None or self.base.kind not in ("rationals", "prime_field"):
                raise ValueError("rational function base must be Q or F_p")
            if not self.vars or len(set(self.vars)) != len(self.vars):
                raise ValueError("rational function variables must be distinct and nonempty")
        elif self.kind == "algebraic":
            if self.base is None or self.base.kind == "algebraic":
                raise ValueError("algebraic extensions are single-layer")
            if len(self.minpoly) < 2 or self.minpoly[-1] != 1:
                raise ValueError("minimal polynomial must be monic and nonconstant")
            if self.alg_name in self.base.function_vars:
                raise ValueError("generator name clashes with a function variable")
        elif self.kind != "rationals":
            raise ValueError(f"unknown field kind {self.kind!r}")

    # -- structure

    @property
    def characteristic(self) -> int:
        if self.kind == "rationals":
            return 0
        if self.kind == "prime_field":
            return self.p
        return self.base.characteristic

    @property
    def function_vars(self) -> tuple:
        if self.kind == "rational_functions":
            return self.vars
        if self.kind == "algebraic":
            return self.base.function_vars
        return ()

    @property
    def prime_subfield(self) -> "ScalarField":
        if self.kind in ("rationals", "prime_field"):
            return self
        return self.base.prime_subfield

    @cached_property
    def ring(self):
        if self.kind != "rational_functions":
            raise TypeError("only rational function fields carry a polynomial ring")
        dom = QQ if self.base.kind == "rationals" else GF(self.base.p)
        return PolyRing(list(self.vars), dom, grlex)

    @cached_property
    def zero(self):
        if self.kind == "rationals":
            return Fraction(0)
        if self.kind == "prime_field":
            return Mod(0, self.p)
        if self.kind == "rational_functions":
            return RatFunc(self.ring.zero, self.ring.one, self, reduced=True)
        return AlgElt((self.base.zero,) * self.degree, self)

    @cached_property
    def one(self):
        return self.coerce(1)

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1 if self.kind == "algebraic" else 1

    def gen(self, name: str):
        """The raw element named ``name`` (a function variable or the algebraic generator)."""
        if self.kind == "rational_functions" and name in self.vars:
            g = self.ring.gens[self.vars.index(name)]
            return RatFunc(g, self.ring.one, self, reduced=True)
        if self.kind == "algebraic":
            if name == self.alg_name:
                if self.degree == 1:
                    return self.coerce(-self.minpoly[0])
                z = self.base.zero
                return AlgElt((z, self.base.one) + (z,) * (self.degree - 2), self)
            return self.coerce(self.base.gen(name))
        raise UnknownVariableError(f"{name!r} is not a variable of {self}")

    def names(self) -> tuple:
        """Every identifier that denotes an element of this field."""
        if self.kind == "algebraic":
            return self.base.names() + (self.alg_name,)
        return self.function_vars

    def coerce(self, x):
        """Map an int, Fraction, Scalar or raw value of a subfield into this field."""
        if isinstance(x, Scalar):
            if x.field == self:
                return x.value
            x = x.value
        k = self.kind
        if k == "rationals":
            if isinstance(x, Fraction):
                return x
            if isinstance(x, int):
                return Fraction(x)
            raise TypeError(f"cannot coerce {x!r} into Q")
        if k == "prime_field":
            if isinstance(x, Mod):
                if x.p != self.p:
                    raise FieldMismatchError(f"F_{x.p} into F_{self.p}")
                return x
            if isinstance(x, int):
                return Mod(x, self.p)
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise ZeroDivisionError(f"{x} has no image in F_{self.p}")
                return Mod(x.numerator * pow(x.denominator, -1, self.p), self.p)
            raise TypeError(f"cannot coerce {x!r} into F_{self.p}")
        if k == "rational_functions":
            if isinstance(x, RatFunc):
                if x.field != self:
                    raise FieldMismatchError(f"{x.field} into {self}")
                return x
            if isinstance(x, (int, Fraction, Mod)):
                c = self.base.coerce(x)
                dom = self.ring.domain
                if isinstance(c, Mod):
                    g = dom(c.v)
                else:
                    g = dom(c.numerator) / dom(c.denominator)
                return RatFunc(self.ring.ground_new(g), self.ring.one, self, reduced=True)
            raise TypeError(f"cannot coerce {x!r} into {self}")
        if isinstance(x, AlgElt):
            if x.field != self:
                raise FieldMismatchError(f"{x.field} into {self}")
            return x
        c = self.base.coerce(x)
        return AlgElt((c,) + (self.base.zero,) * (self.degree - 1), self)

    # -- rational function helpers

    def _ground_to_fraction(self, g):
        if self.base.kind == "rationals":
            return Fraction(int(g.numerator), int(g.denominator))
        return Mod(int(g), self.base.p)

    def _ground_fmt(self, g) -> str:
        return self.base.fmt(self._ground_to_fraction(g))

    # -- algebraic helpers

    def _alg_reduce(self, prod: list) -> tuple:
        n = self.degree
        f = self.minpoly
        prod = list(prod)
        for k in range(len(prod) - 1, n - 1, -1):
            c = prod[k]
            if c:
                for i in range(n):
                    prod[k - n + i] = prod[k - n + i] - c * f[i]
        prod = prod[:n]
        prod += [self.base.zero] * (n - len(prod))
        return tuple(prod)

    def _alg_mul(self, a: tuple, b: tuple) -> tuple:
        z = self.base.zero
        out = [z] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = out[i + j] + x * y
        return self._alg_reduce(out)

    def _alg_inv(self, a: tuple) -> tuple:
        z, o = self.base.zero, self.base.one
        g, s = _ugcdex(list(a), list(self.minpoly), z, o)
        if not g:
            raise ZeroDivisionError("division by zero algebraic element")
        if len(g) != 1:
            raise ZeroDivisionError("minimal polynomial is reducible: zero divisor")
        s = [c / g[0] for c in s]
        return self._alg_reduce(s + [z] * max(0, self.degree - len(s)))

    @cached_property
    def _trace_powers(self) -> tuple:
        n = self.degree
        z, o = self.base.zero, self.base.one
        out = []
        for j in range(n):
            total = z
            for i in range(n):
                e = [z] * (i + j + 1)
                e[i + j] = o
                total = total + self._alg_reduce(e + [z] * max(0, n - len(e)))[i]
            out.append(total)
        return tuple(out)

    @cached_property
    def _gen_derivatives(self) -> dict:
        # x' = -f_v(x) / f_X(x)
        x = self.gen(self.alg_name)
        fx = self.zero
        for i in range(1, len(self.minpoly)):
            fx = fx + self.coerce(self.minpoly[i] * i) * x ** (i - 1)
        out = {}
        for v in self.base.function_vars:
            fv = self.zero
            for i, c in enumerate(self.minpoly):
                fv = fv + self.coerce(self.base.derive(c, v)) * x ** i
            out[v] = -fv / fx
        return out

    def trace(self, a):
        """Field trace F[x]/(f) -> F."""
        if self.kind != "algebraic":
            raise TypeError("trace is defined for algebraic extensions")
        a = self.coerce(a)
        total = self.base.zero
        for c, t in zip(a.c, self._trace_powers):
            if c:
                total = total + c * t
        return total

    # -- calculus

    def derive(self, a, var: str):
        if var not in self.function_vars:
            raise UnknownVariableError(f"{var!r} is not a function variable of {self}")
        a = self.coerce(a)
        if self.kind == "rational_functions":
            g = self.ring.gens[self.vars.index(var)]
            dn = a.num.diff(g)
            dd = a.den.diff(g)
            if not dd:
                return RatFunc(dn, a.den, self)
            return RatFunc(dn * a.den - a.num * dd, a.den * a.den, self)
        # algebraic: coefficientwise plus the chain rule through x
        z = self.base.zero
        direct = AlgElt(tuple(self.base.derive(c, var) for c in a.c), self)
        dpoly = [c * i for i, c in enumerate(a.c)][1:]
        if not any(dpoly):
            return direct
        dpoly = tuple(dpoly) + (z,) * (self.degree - len(dpoly))
        return direct + AlgElt(dpoly, self) * self._gen_derivatives[var]

    def is_constant(self, a) -> bool:
        return all(not self.derive(a, v) for v in self.function_vars)

    # -- text

    def fmt(self, a) -> str:
        a = self.coerce(a)
        if self.kind == "rationals":
            return str(a)
        if self.kind == "prime_field":
            return str(a.v)
        if self.kind == "rational_functions":
            num, den = a.num, a.den
            if den == 1:
                return _poly_text(num, self.ring, self._ground_fmt)
            if self.base.kind == "rationals":
                scale = 1
                for _, c in num.terms():
                    scale = math.lcm(scale, int(c.denominator))
                num = num.mul_ground(scale)
                den = den.mul_ground(scale)
            num = _poly_text(num, self.ring, self._ground_fmt)
            den = _poly_text(den, self.ring, self._ground_fmt)
            if len(a.num.terms()) > 1:
                num = f"({num})"
            if not _is_atom(den):
                den = f"({den})"
            return f"{num}/{den}"
        pieces = []
        for i, c in enumerate(a.c):
            if not c:
                continue
            cs = self.base.fmt(c)
            if i == 0:
                pieces.append(cs)
                continue
            mono = self.alg_name if i == 1 else f"{self.alg_name}^{i}"
            if cs == "1":
                pieces.append(mono)
            elif cs == "-1":
                pieces.append("-" + mono)
            else:
                if not _is_atom(cs.lstrip("-")):
                    cs = f"({cs})"
                pieces.append(f"{cs}*{mono}")
        if not pieces:
            return "0"
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def is_sum(self, a) -> bool:
        """True when the printed form needs parentheses before ``*``."""
        s = self.fmt(a)
        depth = 0
        for i, ch in enumerate(s):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch in "+-" and depth == 0 and i > 0:
                return True
        return False

    def is_negative(self, a) -> bool:
        if self.kind == "rationals":
            return a < 0
        if self.kind == "prime_field":
            return False
        return self.fmt(a).startswith("-")

    def __str__(self):
        if self.kind == "rationals":
            return "Q"
        if self.kind == "prime_field":
            return f"F{self.p}"
        if self.kind == "rational_functions":
            return f"{self.base}({','.join(self.vars)})"
        x = self.alg_name
        terms = []
        for i in range(len(self.minpoly) - 1, -1, -1):
            c = self.minpoly[i]
            if not c:
                continue
            mono = "" if i == 0 else (x if i == 1 else f"{x}^{i}")
            cs = self.base.fmt(c)
            neg = cs.startswith("-")
            if neg:
                cs = cs[1:]
            if mono and cs == "1":
                body = mono
            elif mono:
                body = (cs if _is_atom(cs) else f"({cs})") + "*" + mono
            else:
                body = cs if _is_atom(cs) or not terms else f"({cs})"
            terms.append(("-" if neg else "+", body))
        text = terms[0][1] if terms[0][0] == "+" else "-" + terms[0][1]
        for sign, body in terms[1:]:
            text += sign + body
        return f"{self.base}[{x}]/({text})"


def _is_atom(text: str) -> bool:
    return all(ch.isalnum() or ch in "_^" for ch in text)


QQ_FIELD = ScalarField("rationals")


def rationals() -> ScalarField:
    return QQ_FIELD


def prime_field(p: int) -> ScalarField:
    return ScalarField("prime_field", p=p)


def rational_functions(base: ScalarField, vars) -> ScalarField:
    return ScalarField("rational_functions", base=base, vars=tuple(vars))


def algebraic_extension(base: ScalarField, name: str, minpoly) -> ScalarField:
    """F[name]/(minpoly); ``minpoly`` lists coefficients low degree first, monic."""
    coeffs = tuple(base.coerce(c) for c in minpoly)
    field = ScalarField("algebraic", base=base, alg_name=name, minpoly=coeffs)
    z, o = base.zero, base.one
    deriv = [c * i for i, c in enumerate(coeffs)][1:]
    g, _ = _ugcdex(list(coeffs), deriv, z, o)
    if len(g) != 1:
        raise ValueError("minimal polynomial is not separable")
    return field


@dataclass(frozen=True)
class Scalar:
    """A field-tagged exact scalar."""

    field: ScalarField
    value: object

    @classmethod
    def of(cls, field: ScalarField, x) -> "Scalar":
        return cls(field, field.coerce(x))

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return Scalar(self.field, self.value + self._other(other))

    def __sub__(self, other):
        return Scalar(self.field, self.value - self._other(other))

    def __mul__(self, other):
        return Scalar(self.field, self.value * self._other(other))

    def __truediv__(self, other):
        return Scalar(self.field, self.value / self._other(other))

    def __neg__(self):
        return Scalar(self.field, -self.value)

    def __bool__(self):
        return bool(self.value)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (TypeError, FieldMismatchError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __str__(self):
        return self.field.fmt(self.value)

    def __repr__(self):
        return f"Scalar({self.field}, {self})"

    def to_json(self):
        return {"field": str(self.field), "value": str(self)}


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")
    if op not in _OPS:
        raise ValueError(f"unknown operation {op!r}")
    if op == "div" and not b.value:
        raise ZeroDivisionError("division by zero")
    return Scalar(a.field, _OPS[op](a.value, b.value))


def scalar_derive(a: Scalar, var: str) -> Scalar:
    return Scalar(a.field, a.field.derive(a.value, var))
