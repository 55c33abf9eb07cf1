import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings

from bcadual import gen
from bcadual.bca import ArtinianBca, BcaMorphism, CoeffField, DualElement, FinLenModule, dual_module
from bcadual.errors import UnknownVariableError, UnsupportedShapeError
from bcadual.intensify import (
    Intensification,
    check_associativity,
    check_q_composite,
    check_square_psi,
    check_square_trace,
    intensify_bca,
    intensify_tlf,
    q_dual,
)
from bcadual.linalg import k_rank
from bcadual.parsing import parse_bca, parse_descriptor, parse_form, parse_sigma
from bcadual.series import KummerStep
from bcadual.suites import rand_morphism

from .oracles import laurent_to_sym
from .strategies import QS_T, coefficients, laurents, seeds

K = parse_descriptor("Q(s)")
A = parse_bca("bca A over Q(s) vars t ideal t^2")
M = FinLenModule.from_bca(A)
S0 = CoeffField.canonical(A)
S1 = parse_sigma("sigma s -> s + t", A)
s = K.var("s")


def test_descriptor_base_change():
    assert intensify_tlf(parse_descriptor("Q(s)((t))"), "s") == parse_descriptor("Q((s))((t))")


def test_algebra_base_change_keeps_structure_constants():
    u = Intensification(K, "s")
    hat = intensify_bca(A, u)
    assert hat.coeff_tlf == parse_descriptor("Q((s))")
    assert hat.nilp_vars == A.nilp_vars and hat.basis == A.basis


def test_unknown_variable():
    with pytest.raises(UnknownVariableError):
        Intensification(K, "r")
    with pytest.raises(UnsupportedShapeError):
        Intensification(parse_descriptor("Q((t))"), "t")


def test_expansion_of_a_coefficient_field():
    Kt = parse_descriptor("Q(s)((t))")
    B = parse_bca("bca B over Q(s)((t)) vars x ideal x^3")
    sigma = parse_sigma("sigma s -> s + s*t*x; t -> t + x^2/(1 - s)", B)
    u = Intensification(Kt, "s", 8)
    hat = u.expand_sigma(sigma)
    eps = hat.eps["t"]
    # 1/(1-s) re-expanded as a geometric series, window tracked
    assert eps[2].coeff((0, 3)) == 1 and eps[2].window is not None


def test_q_dual_componentwise():
    u = Intensification(K, "s", 6)
    zero = DualElement(M, S0, [K.zero(), K.zero()])
    assert q_dual(u, S0, M, zero).is_zero()
    out = q_dual(u, S0, M, DualElement(M, S0, [s, s * s]))
    assert [str(c) for c in out.coeffs] == ["s", "s^2"]


def test_q_dual_image_spans_the_dual():
    u = Intensification(K, "s", 6)
    length = dual_module(M).length
    rng = random.Random(4)
    images = [q_dual(u, S1, M, gen.rand_dual(rng, M, S1)) for _ in range(length)]
    rank, exact = k_rank([img.coeffs for img in images])
    assert exact and rank == length


def test_psi_square_examples():
    u = Intensification(K, "s", 12)
    rng = random.Random(5)
    phis = [gen.rand_dual(rng, M, S0) for _ in range(4)]
    assert check_square_psi(u, S0, S0, M, phis).ok
    assert check_square_psi(u, S0, S1, M, phis).ok


def test_failure_injection_is_reported():
    u = Intensification(K, "s", 12)
    phis = [DualElement(M, S0, [s, s * s])]
    rep = check_square_psi(u, S0, S1, M, phis, inject=True)
    assert not rep.ok and rep.cases[0]["verdict"] == "fail"


def test_trace_square_examples():
    u = Intensification(K, "s", 12)
    rng = random.Random(2)
    phis = [gen.rand_dual(rng, M, S0) for _ in range(3)]
    assert check_square_trace(BcaMorphism.identity(A), u, phis).ok
    field = ArtinianBca(K, (), [])
    assert check_square_trace(BcaMorphism.structure(field, A), u, phis).ok


def test_trace_square_with_a_kummer_step():
    Kt = parse_descriptor("Q(s)((t))")
    field = ArtinianBca(Kt, (), [])
    step = KummerStep(Kt, "t", "u", 2, (1,))
    B = ArtinianBca(step.target, ("x",), [(2,)])
    f = BcaMorphism(field, B, [step], {})
    u = Intensification(Kt, "s", 12)
    rng = random.Random(9)
    MB = FinLenModule.from_bca(B)
    phis = [gen.rand_dual(rng, MB, CoeffField.canonical(B)) for _ in range(3)]
    assert check_square_trace(f, u, phis).ok


def test_associativity_examples():
    F2 = parse_descriptor("Q(r,s)")
    B = parse_bca("bca B over Q(r,s) vars x,y ideal x^2,y^2")
    for first, second in (("r", "s"), ("s", "r")):
        u = Intensification(F2, first)
        w = Intensification(u.target, second)
        assert check_associativity(B, u, w, CoeffField.canonical(B), [(1, 0)]).ok


def test_q_composite_either_order():
    F2 = parse_descriptor("Q(r,s)")
    B = parse_bca("bca B over Q(r,s) vars x ideal x^2")
    N = FinLenModule.from_bca(B)
    sigma = parse_sigma("sigma r -> r + x; s -> s + r*x", B)
    r_, s_ = F2.var("r"), F2.var("s")
    phis = [DualElement(N, sigma, [r_ * s_, s_])]
    u = Intensification(F2, "r", 12)
    w = Intensification(u.target, "s", 12)
    assert check_q_composite(u, w, sigma, N, phis).ok


@settings(max_examples=30, deadline=None)
@given(laurents(QS_T, max_terms=3), laurents(QS_T, max_terms=3))
def test_expansion_is_multiplicative(x, y):
    u = Intensification(QS_T, "s", 10)
    assert u.expand(x * y).agrees(u.expand(x) * u.expand(y))


@settings(max_examples=30, deadline=None)
@given(coefficients(QS_T.coeff_field))
def test_expansion_matches_sympy(c):
    u = Intensification(K, "s", 6)
    hat = u.expand(K.const(c))
    expr = laurent_to_sym(K.const(c))
    expected = sympy.series(expr, sympy.Symbol("s"), 0, 7).removeO()
    for k in range(-2, 7):
        assert hat.coeff((k,)) == Fraction(str(expected.coeff(sympy.Symbol("s"), k)))


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_random_trace_squares(seed):
    rng = random.Random(seed)
    Kr = parse_descriptor(rng.choice(["Q(s)", "Q(s)((t))"]))
    B0 = gen.rand_bca(rng, Kr, 4)
    f = rand_morphism(rng, B0, max_length=8)
    u = Intensification(Kr, "s", 12)
    MB = FinLenModule.from_bca(f.target)
    phis = [gen.rand_dual(rng, MB, CoeffField.canonical(f.target))]
    assert check_square_trace(f, u, phis, gen.rand_sigma(rng, B0)).ok


def test_forms_are_expanded_with_their_differentials():
    Kt = parse_descriptor("Q(s)((t))")
    u = Intensification(Kt, "s", 4)
    alpha = parse_form("1/(1 - s)*ds^dt", Kt)
    hat = u.expand_form(alpha)
    assert hat.tlf == parse_descriptor("Q((s))((t))")
    expected = parse_form("(1 + s + s^2 + s^3 + s^4 + O(s^5))*ds^dt", hat.tlf)
    assert hat.agrees(expected)
