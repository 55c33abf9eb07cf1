from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings

from bcadual.errors import DescriptorMismatchError, PrecisionError
from bcadual.parsing import parse_descriptor, parse_series
from bcadual.scalars import rational_functions, rationals
from bcadual.series import (
    KummerStep,
    Laurent,
    LaurentStep,
    apply_step,
    coeff_at,
    expand_rational,
    series_arith,
    series_derive,
    series_invert,
)

from .oracles import laurent_to_sym, same, series_coeffs, sym
from .strategies import Q_T, Q_T1T2, QS_T, coefficients, laurents, nonzero_laurents

QS = rational_functions(rationals(), ("s",))


def P(text, desc="Q((t))"):
    return parse_series(text, parse_descriptor(desc))


def test_exact_sum():
    x = series_arith(P("t + 1"), P("t^-1"), "add")
    assert str(x) == "t^-1 + 1 + t" and x.is_exact


def test_windowed_product_keeps_window():
    x = P("1 + t + O(t^4)") * P("1 - t + O(t^4)")
    assert str(x) == "1 - t^2 + O(t^4)"
    assert x.window == ((0, 3),)


def test_product_with_function_coefficients_cancels():
    x = P("s*t^-1", "Q(s)((t))") * P("s^-1*t", "Q(s)((t))")
    assert x == P("1", "Q(s)((t))") and x.is_exact


def test_invert_monomial_is_exact():
    assert series_invert(P("t")) == P("t^-1")
    assert series_invert(P("t")).is_exact


def test_invert_geometric():
    assert str(series_invert(P("1 - t"), (3,))) == "1 + t + t^2 + t^3 + O(t^4)"


@pytest.mark.parametrize("desc, leading", [("Q((s))((t))", "s^-1"), ("Q((t))((s))", "t^-1")])
def test_invert_depends_on_the_ordering(desc, leading):
    x = P("s + t", desc)
    inv = series_invert(x, (5, 5))
    assert str(inv).startswith(leading)
    prod = x * inv
    # brute multiplication: 1 on every exponent the window certifies
    for e, c in prod.terms.items():
        assert c == (1 if e == (0, 0) else 0)
    assert prod.coeff((0, 0)) == 1


def test_derivatives():
    assert series_derive(P("t^2"), "t") == P("2*t")
    assert series_derive(P("t^-1"), "t") == P("-t^-2")
    assert series_derive(P("s*t^-1", "Q(s)((t))"), "s") == P("t^-1", "Q(s)((t))")


def test_coeff_at():
    assert coeff_at(P("2*t^-2 + 3*t^-1 + 5"), (-1,)).value == 3
    assert coeff_at(P("1 - t^2"), (1,)).value == 0
    with pytest.raises(PrecisionError):
        coeff_at(P("1 + t + O(t^3)"), (3,))


def test_expand_rational():
    s = QS.gen("s")
    assert str(expand_rational(QS.one / (1 - s), QS, ["s"], 4)) == "1 + s + s^2 + s^3 + s^4 + O(s^5)"
    inv = expand_rational(QS.one / s, QS, ["s"])
    assert str(inv) == "s^-1" and inv.is_exact
    x = expand_rational((s + s * s) / (1 - s), QS, ["s"], 3)
    assert str(x) == "s + 2*s^2 + 2*s^3 + O(s^4)"
    # multiply back by (1 - s): s + s^2 on the certified window
    back = x * Laurent(x.tlf, {(0,): 1, (1,): -1})
    assert str(back) == "s + s^2 + O(s^4)"


def test_expand_rational_needs_a_window():
    s = QS.gen("s")
    with pytest.raises(PrecisionError):
        expand_rational(QS.one / (1 - s), QS, ["s"])


def test_laurent_step_embeds():
    K = parse_descriptor("Q((s))")
    step = LaurentStep(K, "t")
    assert str(apply_step(P("1 + s", "Q((s))"), step)) == "1 + s"
    assert step.target.vars == ("t", "s")


def test_kummer_substitution():
    K = parse_descriptor("Q((t))")
    pure = KummerStep(K, "t", "u", 2, (1,))
    assert str(apply_step(P("t^-1 + t"), pure)) == "u^-2 + u^2"
    ramified = KummerStep(K, "t", "u", 2, (1, 1))
    assert str(apply_step(P("t"), ramified)) == "u^2 + u^3"


def test_mismatched_descriptors():
    with pytest.raises(DescriptorMismatchError):
        series_arith(P("t"), P("s", "Q((s))"), "add")


@settings(max_examples=50, deadline=None)
@given(laurents(QS_T), laurents(QS_T))
def test_product_matches_sympy(x, y):
    assert same(laurent_to_sym(x * y), laurent_to_sym(x) * laurent_to_sym(y))


@settings(max_examples=50, deadline=None)
@given(laurents(Q_T1T2), laurents(Q_T1T2))
def test_two_variable_sum_and_product(x, y):
    assert same(laurent_to_sym(x + y), laurent_to_sym(x) + laurent_to_sym(y))
    assert same(laurent_to_sym(x * y), laurent_to_sym(x) * laurent_to_sym(y))


@settings(max_examples=50, deadline=None)
@given(laurents(QS_T))
def test_derivative_matches_sympy(x):
    for v in ("t", "s"):
        assert same(laurent_to_sym(x.derive(v)), sympy.diff(laurent_to_sym(x), sympy.Symbol(v)))


@settings(max_examples=40, deadline=None)
@given(nonzero_laurents(Q_T, max_terms=4))
def test_inverse_times_element_is_one_on_the_window(x):
    inv = x.invert((6,))
    prod = x * inv
    assert prod.agrees(Q_T.one())


@settings(max_examples=40, deadline=None)
@given(nonzero_laurents(Q_T1T2, max_terms=3))
def test_two_variable_inverse(x):
    assert (x * x.invert((4, 4))).agrees(Q_T1T2.one())


@settings(max_examples=30, deadline=None)
@given(coefficients(QS))
def test_expansion_matches_sympy_taylor(num):
    s = QS.gen("s")
    a = num / (QS.one + 2 * s + 3 * s * s)
    x = expand_rational(a, QS, ["s"], 6)
    expected = series_coeffs(sym(QS.fmt(a), ["s"]), "s", 6)
    assert [x.coeff((k,)) for k in range(7)] == [Fraction(str(v)) for v in expected]
