"""Text syntax for descriptors, series, forms, operators and BCA declarations.

Expressions: integers, ``a/b``, variables, ``+ - * / ^``, parentheses,
``d<var>`` differentials, ``D<var>`` partial derivatives and ``O(v^N)``
precision tails.  ``^`` between forms is the wedge product; otherwise it is
an integer power.  Descriptors look like ``Q``, ``F7``, ``Q(s)``,
``Q(s)((t1,t2))``, ``Q((s))((t))`` (innermost group first) and
``Q(s)[x]/(x^2-s)((t))``.
"""
from __future__ import annotations

import re

from .bca.algebra import ArtinianBca, CoeffField
from .errors import ParseError
from .forms import Form, wedge
from .scalars import ScalarField, algebraic_extension, prime_field, rational_functions, rationals
from .series import INF, Laurent, TlfDescriptor
from .weyl import DiffOp

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(->|[-+*/^(),\[\];]))")


def tokenize(text: str) -> list:
    """[(kind, value, position)] with kinds num, name, op, end."""
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", int(m.group(1)), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Stream:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.offset = offset

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, value) -> bool:
        return self.peek()[0] == "op" and self.peek()[1] == value

    def expect(self, value):
        t = self.next()
        if t[0] != "op" or t[1] != value:
            self.fail(f"expected {value!r}", t)
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2] + self.offset, self.text)

    def done(self):
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")


# -- descriptors

def _field_base(st: _Stream) -> ScalarField:
    kind, name, pos = st.next()
    if kind != "name":
        st.fail("expected a field name", (kind, name, pos))
    if name == "Q":
        return rationals()
    m = re.fullmatch(r"F(\d+)", name)
    if m:
        try:
            return prime_field(int(m.group(1)))
        except ValueError as exc:
            raise ParseError(str(exc), pos + st.offset, st.text) from None
    st.fail(f"unknown base field {name!r}", (kind, name, pos))


def _names(st: _Stream) -> list:
    names = []
    while True:
        kind, name, pos = st.next()
        if kind != "name":
            st.fail("expected a variable name", (kind, name, pos))
        names.append(name)
        if st.at(","):
            st.next()
            continue
        return names


def _double_paren(st: _Stream) -> bool:
    return st.at("(") and st.peek(1)[0] == "op" and st.peek(1)[1] == "("


def parse_field_stream(st: _Stream) -> ScalarField:
    F = _field_base(st)
    if st.at("(") and not _double_paren(st):
        st.next()
        F = rational_functions(F, _names(st))
        st.expect(")")
    if st.at("["):
        st.next()
        kind, gen, pos = st.next()
        if kind != "name":
            st.fail("expected a generator name", (kind, gen, pos))
        st.expect("]")
        st.expect("/")
        st.expect("(")
        poly = _poly_in(st, F, gen)
        st.expect(")")
        try:
            F = algebraic_extension(F, gen, poly)
        except ValueError as exc:
            raise ParseError(str(exc), pos + st.offset, st.text) from None
    return F


def parse_descriptor_stream(st: _Stream) -> TlfDescriptor:
    F = parse_field_stream(st)
    groups = []
    while _double_paren(st):
        st.next()
        st.next()
        groups.append(_names(st))
        st.expect(")")
        st.expect(")")
    # later groups are outer: F((s))((t)) = (F((s)))((t))
    vars = []
    for g in reversed(groups):
        vars.extend(g)
    return TlfDescriptor(F, tuple(vars))


def parse_descriptor(text: str) -> TlfDescriptor:
    st = _Stream(text)
    out = parse_descriptor_stream(st)
    st.done()
    return out


def parse_field(text: str) -> ScalarField:
    st = _Stream(text)
    out = parse_field_stream(st)
    st.done()
    return out


# -- univariate polynomials for minimal polynomials

def _p_add(a, b, zero):
    n = max(len(a), len(b))
    a = a + [zero] * (n - len(a))
    b = b + [zero] * (n - len(b))
    return [x + y for x, y in zip(a, b)]


def _p_mul(a, b, zero):
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_in(st: _Stream, F: ScalarField, gen: str) -> tuple:
    zero, one = F.zero, F.one

    def atom():
        kind, val, pos = st.peek()
        if kind == "num":
            st.next()
            return [F.coerce(val)]
        if kind == "name":
            st.next()
            if val == gen:
                return [zero, one]
            if val in F.names():
                return [F.gen(val)]
            st.fail(f"unknown name {val!r} in polynomial", (kind, val, pos))
        if st.at("("):
            st.next()
            v = expr()
            st.expect(")")
            return v
        st.fail("expected a polynomial term")

    def power():
        base = atom()
        if st.at("^"):
            st.next()
            kind, n, pos = st.next()
            if kind != "num":
                st.fail("expected an exponent", (kind, n, pos))
            out = [one]
            for _ in range(n):
                out = _p_mul(out, base, zero)
            return out
        return base

    def unary():
        if st.at("-"):
            st.next()
            return [-c for c in unary()]
        if st.at("+"):
            st.next()
        return power()

    def term():
        v = unary()
        while st.at("*") or st.at("/"):
            op = st.next()[1]
            w = unary()
            if op == "*":
                v = _p_mul(v, w, zero)
            else:
                if len(w) != 1 or not w[0]:
                    st.fail("division by a non-constant in a polynomial")
                v = [c / w[0] for c in v]
        return v

    def expr():
        v = term()
        while st.at("+") or st.at("-"):
            op = st.next()[1]
            w = term()
            v = _p_add(v, w if op == "+" else [-c for c in w], zero)
        return v

    coeffs = expr()
    while len(coeffs) > 1 and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


# -- expressions over a descriptor

class AlgValue:
    """An element of an Artinian BCA, used while reading coefficient-field images."""

    def __init__(self, bca: ArtinianBca, vec):
        self.bca = bca
        self.vec = list(vec)


class ExprParser:
    def __init__(self, tlf: TlfDescriptor, text: str, offset: int = 0, bca: ArtinianBca | None = None,
                 window=None):
        self.tlf = tlf
        self.bca = bca
        self.st = _Stream(text, offset)
        self.target = self._target(window)

    def _target(self, window):
        """Precision for non-monomial inverses: --window and every O(v^N) tail."""
        n = self.tlf.dim
        if window is None:
            hi = [INF] * n
        elif isinstance(window, int):
            hi = [window] * n
        else:
            hi = list(window)
        toks = self.st.toks
        for i, (kind, val, _) in enumerate(toks):
            if kind == "name" and val == "O" and i + 2 < len(toks) and toks[i + 1][1] == "(":
                v = toks[i + 2][1]
                if v not in self.tlf.vars:
                    continue
                k = 1
                rest = [t[1] for t in toks[i + 3:i + 6]]
                if rest[:1] == ["^"]:
                    if rest[1] == "-" and isinstance(rest[2], int):
                        k = -rest[2]
                    elif isinstance(rest[1], int):
                        k = rest[1]
                j = self.tlf.vars.index(v)
                hi[j] = min(hi[j], k - 1)
        if all(h == INF for h in hi):
            return None
        return tuple(hi)

    # value plumbing

    def _lift_pair(self, a, b):
        kinds = (type(a), type(b))
        if AlgValue in kinds:
            return self._alg(a), self._alg(b)
        if DiffOp in kinds:
            return self._op(a), self._op(b)
        if Form in kinds:
            return self._form(a), self._form(b)
        return a, b

    def _alg(self, x):
        if isinstance(x, AlgValue):
            return x
        if isinstance(x, Laurent):
            return AlgValue(self.bca, self.bca.const(x))
        self.st.fail("cannot use this value inside an algebra element")

    def _op(self, x):
        if isinstance(x, DiffOp):
            return x
        if isinstance(x, Laurent):
            return DiffOp.scalar(x)
        self.st.fail("cannot combine a form with an operator")

    def _form(self, x):
        if isinstance(x, Form):
            return x
        if isinstance(x, Laurent):
            return Form.function(x)
        self.st.fail("cannot combine an operator with a form")

    def add(self, a, b, tok):
        if isinstance(a, Laurent) and isinstance(b, Form):
            a, b = b, a
        if isinstance(a, Form) and isinstance(b, Laurent) and not b.terms and b.window is not None:
            # a precision tail applies to every component
            return Form(self.tlf, a.degree, {k: c + b for k, c in a.components.items()})
        a, b = self._lift_pair(a, b)
        if isinstance(a, AlgValue):
            return AlgValue(self.bca, self.bca.add(a.vec, b.vec))
        if isinstance(a, Form) and a.degree != b.degree:
            self.st.fail("cannot add forms of different degrees", tok)
        return a + b

    def neg(self, a):
        if isinstance(a, AlgValue):
            return AlgValue(self.bca, [-x for x in a.vec])
        return -a

    def mul(self, a, b, tok):
        if isinstance(a, AlgValue) or isinstance(b, AlgValue):
            a, b = self._alg(a), self._alg(b)
            return AlgValue(self.bca, self.bca.mul(a.vec, b.vec))
        if isinstance(a, Laurent) and isinstance(b, Laurent):
            return a * b
        if isinstance(a, Form) or isinstance(b, Form):
            if isinstance(a, DiffOp) or isinstance(b, DiffOp):
                self.st.fail("cannot multiply a form and an operator", tok)
            if isinstance(a, Laurent):
                return b.scale(a)
            if isinstance(b, Laurent):
                return a.scale(b)
            return wedge(a, b)
        return self._op(a) * self._op(b)

    def div(self, a, b, tok):
        if not isinstance(b, Laurent):
            self.st.fail("can only divide by a function", tok)
        inv = self._invert(b, tok)
        return self.mul(a, inv, tok)

    def _invert(self, b: Laurent, tok):
        if not b.terms and b.window is None:
            raise ZeroDivisionError("division by zero")
        if len(b.terms) == 1 and b.window is None:
            return b.invert()
        return b.invert(self.target)

    def power(self, a, n: int, tok):
        if isinstance(a, Form):
            self.st.fail("forms have no integer powers; use ^ between forms for the wedge", tok)
        if isinstance(a, AlgValue):
            if n < 0:
                self.st.fail("negative powers are not defined in the algebra", tok)
            return AlgValue(self.bca, self.bca.power(a.vec, n))
        if isinstance(a, DiffOp):
            if n < 0:
                self.st.fail("operators have no negative powers", tok)
            out = DiffOp.identity(self.tlf)
            for _ in range(n):
                out = out * a
            return out
        if n < 0:
            return self._invert(a, tok) ** (-n)
        return a ** n

    # grammar

    def parse(self):
        v = self.expr()
        self.st.done()
        return v

    def expr(self):
        st = self.st
        if st.at("-"):
            tok = st.next()
            v = self.neg(self.term())
        else:
            if st.at("+"):
                st.next()
            v = self.term()
        while st.at("+") or st.at("-"):
            tok = st.next()
            w = self.term()
            v = self.add(v, w if tok[1] == "+" else self.neg(w), tok)
        return v

    def term(self):
        st = self.st
        v = self.factor()
        while st.at("*") or st.at("/"):
            tok = st.next()
            w = self.factor()
            v = self.mul(v, w, tok) if tok[1] == "*" else self.div(v, w, tok)
        return v

    def factor(self):
        st = self.st
        if st.at("-"):
            st.next()
            return self.neg(self.factor())
        v = self.atom()
        while st.at("^"):
            tok = st.next()
            sign = 1
            if st.at("-"):
                st.next()
                sign = -1
            if st.peek()[0] == "num":
                v = self.power(v, sign * st.next()[1], tok)
            else:
                if sign < 0:
                    st.fail("expected an exponent")
                w = self.atom()
                if not isinstance(v, Form) or not isinstance(w, Form):
                    st.fail("^ between non-forms needs an integer exponent", tok)
                v = wedge(v, w)
        return v

    def atom(self):
        st = self.st
        kind, val, pos = st.peek()
        if kind == "num":
            st.next()
            return self.tlf.const(val)
        if kind == "name":
            if val == "O" and st.peek(1)[1] == "(":
                return self._big_o()
            st.next()
            return self._name(val, (kind, val, pos))
        if st.at("("):
            st.next()
            v = self.expr()
            st.expect(")")
            return v
        st.fail("expected a value")

    def _name(self, name: str, tok):
        tlf = self.tlf
        if self.bca is not None and name in self.bca.nilp_vars:
            return AlgValue(self.bca, self.bca.var(name))
        if name in tlf.all_vars:
            return tlf.var(name)
        F = tlf.coeff_field
        if name in F.names():
            return tlf.const(F.gen(name))
        if name[0] == "d" and name[1:] in tlf.all_vars:
            return Form.differential(tlf, name[1:])
        if name[0] == "D" and name[1:] in tlf.all_vars:
            return DiffOp.partial(tlf, name[1:])
        self.st.fail(f"unknown name {name!r} over {tlf}", tok)

    def _big_o(self):
        st = self.st
        st.next()
        st.expect("(")
        kind, var, pos = st.next()
        if kind != "name" or var not in self.tlf.vars:
            st.fail("O() takes a Laurent variable", (kind, var, pos))
        n = 1
        if st.at("^"):
            st.next()
            sign = 1
            if st.at("-"):
                st.next()
                sign = -1
            kind, n, pos = st.next()
            if kind != "num":
                st.fail("expected an exponent", (kind, n, pos))
            n *= sign
        st.expect(")")
        j = self.tlf.vars.index(var)
        window = tuple((n, n - 1) if i == j else (INF, INF) for i in range(self.tlf.dim))
        return Laurent(self.tlf, {}, window, trusted=True)


def parse_expr(text: str, tlf: TlfDescriptor, offset: int = 0, window=None):
    """Laurent, Form or DiffOp."""
    return ExprParser(tlf, text, offset, window=window).parse()


def parse_series(text: str, tlf: TlfDescriptor, window=None) -> Laurent:
    v = parse_expr(text, tlf, window=window)
    if not isinstance(v, Laurent):
        raise ParseError("expected a series", 0, text)
    return v


def parse_form(text: str, tlf: TlfDescriptor, window=None) -> Form:
    v = parse_expr(text, tlf, window=window)
    if isinstance(v, Laurent):
        return Form.function(v)
    if not isinstance(v, Form):
        raise ParseError("expected a differential form", 0, text)
    return v


def parse_op(text: str, tlf: TlfDescriptor, window=None) -> DiffOp:
    v = parse_expr(text, tlf, window=window)
    if isinstance(v, Laurent):
        return DiffOp.scalar(v)
    if not isinstance(v, DiffOp):
        raise ParseError("expected a differential operator", 0, text)
    return v


def infer_descriptor(texts) -> TlfDescriptor:
    """Q((v1, v2, ...)) from the names used, in order of first appearance.

    ``d<v>`` and ``D<v>`` count as the variable v.
    """
    seen = []
    for text in texts:
        for kind, val, _ in tokenize(text):
            if kind != "name" or val == "O":
                continue
            name = val[1:] if val[0] in "dD" and len(val) > 1 else val
            if name not in seen:
                seen.append(name)
    return TlfDescriptor(rationals(), tuple(seen))


# -- BCA declarations

def parse_bca(text: str) -> ArtinianBca:
    """``bca A over Q(s) vars t,w ideal t^2,w^3,t*w``."""
    m = re.fullmatch(r"\s*bca\s+(\w+)\s+over\s+(.+?)\s+vars\s+(.+?)\s+ideal\s+(.+?)\s*", text)
    if not m:
        raise ParseError("expected 'bca NAME over FIELD vars V,.. ideal M,..'", 0, text)
    tlf = parse_descriptor(m.group(2))
    names = [v.strip() for v in m.group(3).split(",")]
    gens = []
    base = m.start(4)
    for piece in _split_top(m.group(4), ","):
        gens.append(_monomial(piece[0], names, base + piece[1], text))
    try:
        return ArtinianBca(tlf, names, gens)
    except ValueError as exc:
        raise ParseError(str(exc), m.start(4), text) from None


def _split_top(text: str, sep: str) -> list:
    out = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    return out


def _monomial(text: str, names, offset: int, full: str) -> tuple:
    exps = [0] * len(names)
    for part in text.split("*"):
        part = part.strip()
        m = re.fullmatch(r"(\w+)(?:\^(\d+))?", part)
        if not m or m.group(1) not in names:
            raise ParseError(f"bad monomial {text.strip()!r}", offset, full)
        exps[names.index(m.group(1))] += int(m.group(2) or 1)
    return tuple(exps)


def parse_sigma(text: str, bca: ArtinianBca) -> CoeffField:
    """``sigma s -> s + t; u -> u + t*w`` (or ``sigma canonical``)."""
    body = text.strip()
    if body.startswith("sigma"):
        body = body[len("sigma"):]
    offset = len(text) - len(body)
    if body.strip() == "canonical":
        return CoeffField.canonical(bca)
    eps = {}
    tlf = bca.coeff_tlf
    for piece, start in _split_top(body, ";"):
        if not piece.strip():
            continue
        if "->" not in piece:
            raise ParseError("expected 'v -> image'", offset + start, text)
        lhs, rhs = piece.split("->", 1)
        v = lhs.strip()
        if v not in tlf.all_vars:
            raise ParseError(f"{v!r} is not a coordinate of {tlf}", offset + start, text)
        rhs_off = offset + start + piece.index("->") + 2
        val = ExprParser(tlf, rhs, rhs_off, bca).parse()
        if isinstance(val, Laurent):
            val = AlgValue(bca, bca.const(val))
        if not isinstance(val, AlgValue):
            raise ParseError("coefficient-field image must be an algebra element", rhs_off, text)
        eps[v] = bca.sub(val.vec, bca.const(tlf.var(v)))
    try:
        return CoeffField(bca, eps)
    except ValueError as exc:
        raise ParseError(str(exc), offset, text) from None


def parse_algebra_element(text: str, bca: ArtinianBca) -> list:
    val = ExprParser(bca.coeff_tlf, text, 0, bca).parse()
    if isinstance(val, Laurent):
        return bca.const(val)
    if not isinstance(val, AlgValue):
        raise ParseError("expected an algebra element", 0, text)
    return val.vec


__all__ = [
    "tokenize", "parse_descriptor", "parse_field", "parse_expr", "parse_series", "parse_form",
    "parse_op", "infer_descriptor", "parse_bca", "parse_sigma", "parse_algebra_element",
]
