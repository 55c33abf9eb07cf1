"""Independent reference computations in sympy.

Nothing here calls the package's arithmetic: values cross over as text
and are rebuilt as sympy expressions.
"""
from __future__ import annotations

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

_TRANSFORMS = standard_transformations + (convert_xor,)


def sym(text: str, names) -> sympy.Expr:
    local = {n: sympy.Symbol(n) for n in names}
    return parse_expr(str(text), local_dict=local, transformations=_TRANSFORMS)


def laurent_to_sym(x) -> sympy.Expr:
    """A finite Laurent element as a sympy expression, built term by term."""
    names = x.tlf.all_vars
    F = x.tlf.coeff_field
    total = sympy.Integer(0)
    for e, c in x.terms.items():
        mono = sympy.Integer(1)
        for v, k in zip(x.tlf.vars, e):
            mono *= sympy.Symbol(v) ** k
        total += sym(F.fmt(c), names) * mono
    return total


def same(a, b) -> bool:
    return sympy.simplify(sympy.sympify(a) - sympy.sympify(b)) == 0


def coefficient(expr, var: str, k: int, shift: int = 40) -> sympy.Expr:
    """Coefficient of var^k in a Laurent polynomial in var (other symbols are coefficients)."""
    v = sympy.Symbol(var)
    poly = sympy.Poly(sympy.expand(expr * v ** shift), v)
    return sympy.simplify(poly.coeff_monomial(v ** (k + shift))) if k + shift >= 0 else sympy.Integer(0)


def iterated_residue(expr, laurent_vars) -> sympy.Expr:
    """Coefficient of prod t_j^-1 in a Laurent polynomial."""
    for v in laurent_vars:
        expr = coefficient(expr, v, -1)
    return sympy.simplify(expr)


def series_coeffs(expr, var: str, upto: int) -> list:
    """Taylor coefficients of expr at var = 0 for orders 0..upto."""
    v = sympy.Symbol(var)
    s = sympy.series(expr, v, 0, upto + 1).removeO()
    return [sympy.simplify(s.coeff(v, k)) for k in range(upto + 1)]


def apply_op(D, expr) -> sympy.Expr:
    """sum a_beta d^beta (expr) with sympy derivatives."""
    names = D.tlf.all_vars
    total = sympy.Integer(0)
    for beta, a in D.terms.items():
        e = expr
        for v, k in zip(names, beta):
            if k:
                e = sympy.diff(e, sympy.Symbol(v), k)
        total += laurent_to_sym(a) * e
    return total
