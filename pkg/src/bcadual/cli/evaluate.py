"""The ``eval`` mini-language.

    res FORM                  residue down to the coefficient field
    apply OP to X             D(a)
    lie OP on FORM            Lie derivative along a first-order operator
    d FORM                    exterior derivative
    right FORM by OP          right action on top forms
    transpose OP              formal adjoint
    invert X                  multiplicative inverse (uses the window)
    expand X promote V        expansion along K -> K with V promoted
    X                         canonical form of an expression

Any command may end in ``over DESCRIPTOR``; otherwise the descriptor is
Q((v1, ...)) over the variables in order of appearance.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError
from ..forms import Derivation, Form, exterior_d, lie_derivative, residue
from ..intensify import DEFAULT_WINDOW, Intensification
from ..parsing import infer_descriptor, parse_descriptor, parse_expr, parse_form, parse_op, parse_series
from ..series import Laurent
from ..weyl import DiffOp, do_apply, right_action, transpose


@dataclass
class Evaluation:
    command: str
    descriptor: str
    kind: str
    value: object

    def text(self) -> str:
        return str(self.value)

    def to_json(self) -> dict:
        out = {"command": self.command, "descriptor": self.descriptor, "kind": self.kind, "value": str(self.value)}
        if hasattr(self.value, "to_json"):
            out["data"] = self.value.to_json()
        return out


def _split_keyword(text: str, word: str):
    """(before, after) around the last top-level ``word``, or (text, None)."""
    depth = 0
    hit = None
    for m in re.finditer(r"[()]|\b" + word + r"\b", text):
        tok = m.group(0)
        if tok == "(":
            depth += 1
        elif tok == ")":
            depth -= 1
        elif depth == 0:
            hit = m
    if hit is None:
        return text, None
    return text[:hit.start()].strip(), text[hit.end():].strip()


def _kind(value) -> str:
    if isinstance(value, Laurent):
        return "series"
    if isinstance(value, Form):
        return "form"
    if isinstance(value, DiffOp):
        return "operator"
    return type(value).__name__.lower()


def _as_derivation(D: DiffOp) -> Derivation:
    tlf = D.tlf
    coeffs = {}
    for beta, a in D.terms.items():
        if sum(beta) != 1:
            raise ParseError("lie needs a first-order operator without constant term", 0, str(D))
        coeffs[tlf.all_vars[beta.index(1)]] = a
    return Derivation(tlf, coeffs)


_COMMANDS = {
    "res": (None, 1),
    "apply": ("to", 2),
    "lie": ("on", 2),
    "d": (None, 1),
    "right": ("by", 2),
    "transpose": (None, 1),
    "invert": (None, 1),
    "expand": (None, 1),
}


def evaluate(text: str, window: int | None = None) -> Evaluation:
    text = text.strip()
    promote = None
    if text.startswith("expand "):
        text, promote = _split_keyword(text, "promote")
        if promote is None:
            raise ParseError("expand expects 'promote'", 0, text)
    body, desc_text = _split_keyword(text, "over")
    head, _, rest = body.partition(" ")
    command = head if head in _COMMANDS and rest.strip() else "expr"
    if command == "expr":
        args = [body]
    else:
        sep, _ = _COMMANDS[command]
        args = [rest.strip()]
        if sep is not None:
            first, second = _split_keyword(rest, sep)
            if second is None:
                raise ParseError(f"{command} expects '{sep}'", len(head) + 1, text)
            args = [first, second]
    if command == "expand" and desc_text is None:
        raise ParseError("expand needs 'over DESCRIPTOR'", 0, text)
    K = parse_descriptor(desc_text) if desc_text is not None else infer_descriptor(args)
    value = _run(command, args, K, window, promote)
    return Evaluation(command, str(K), _kind(value), value)


def _run(command, args, K, window, promote):
    if command == "expr":
        return parse_expr(args[0], K)
    if command == "res":
        alpha = parse_form(args[0], K)
        if alpha.is_zero():
            # a printed zero carries no degree
            alpha = Form.zero(K, len(K.all_vars))
        return residue(alpha)
    if command == "apply":
        return do_apply(parse_op(args[0], K), parse_series(args[1], K))
    if command == "lie":
        return lie_derivative(_as_derivation(parse_op(args[0], K)), parse_form(args[1], K))
    if command == "d":
        return exterior_d(parse_form(args[0], K))
    if command == "right":
        return right_action(parse_form(args[0], K), parse_op(args[1], K))
    if command == "transpose":
        return transpose(parse_op(args[0], K))
    if command == "invert":
        x = parse_series(args[0], K)
        if len(x.terms) == 1 and x.window is None:
            return x.invert()
        w = DEFAULT_WINDOW if window is None else window
        return x.invert(tuple(w for _ in range(K.dim)))
    u = Intensification(K, tuple(v.strip() for v in promote.split(",")), window or DEFAULT_WINDOW)
    value = parse_expr(args[0], K)
    if isinstance(value, Form):
        return u.expand_form(value)
    if isinstance(value, DiffOp):
        return u.expand_op(value)
    return u.expand(value)
