import random

import pytest
import sympy
from hypothesis import given, settings

from bcadual import gen
from bcadual.bca import (
    ArtinianBca,
    BcaMorphism,
    CoeffField,
    ContinuousDO,
    DualElement,
    FinLenModule,
    dij_matrix,
    dual_do,
    dual_eval,
    dual_of_do,
    evaluation_matrix,
    f_sharp,
    k_dualizing,
    omega_complex,
    psi,
    residue_pairing,
    sigma_apply,
    trace_map,
)
from bcadual.bca.duals import bca_order, dual_eval_coeff, sigma_times
from bcadual.errors import FieldMismatchError
from bcadual.forms import Form
from bcadual.linalg import c_rank
from bcadual.parsing import parse_algebra_element, parse_bca, parse_descriptor, parse_op, parse_sigma
from bcadual.weyl import DiffOp, DiffOpMatrix

from .oracles import laurent_to_sym, same
from .strategies import seeds

K = parse_descriptor("Q(s)")
s = K.var("s")
A = parse_bca("bca A over Q(s) vars t ideal t^2")
M = FinLenModule.from_bca(A)
S0 = CoeffField.canonical(A)
S1 = parse_sigma("sigma s -> s + t", A)


def test_monomial_algebra_shape():
    B = parse_bca("bca B over Q((t)) vars x,y ideal x^2,y^3,x*y")
    assert B.length == 4
    assert B.basis[0] == (0, 0)
    x, y = B.var("x"), B.var("y")
    assert B.is_zero(B.mul(x, y))
    assert not B.is_zero(B.mul(y, y))


def test_canonical_field_is_constant_embedding():
    lam = s * s + 1
    assert sigma_apply(S0, lam) == A.const(lam)


def test_first_order_taylor():
    assert A.format_element(sigma_apply(S1, s * s)) == "s^2 + 2*s*t"
    F = K.coeff_field
    sv = F.gen("s")
    lam = K.const(sv ** 3 / (sv + 1))
    out = sigma_apply(S1, lam)
    assert out[0] == lam and out[1] == lam.derive("s")


def test_dual_element_evaluation():
    phi = DualElement(M, S0, [s, s * s])
    assert dual_eval(phi, A.one()) == Form.top(s)
    x = A.add(A.one(), A.scale(A.var("t"), K.const(2)))
    assert dual_eval(phi, x) == Form.top(s + 2 * s * s)
    # K-linearity through the coefficient field
    lam = s + 3
    phi1 = DualElement(M, S1, [s, s * s])
    assert dual_eval_coeff(phi1, sigma_apply(S1, lam)) == lam * s


def test_dij_identity_and_example():
    assert dij_matrix(S0, S0, M) == DiffOpMatrix.identity(K, 2)
    D = dij_matrix(S0, S1, M)
    assert D.rows[0][0] == DiffOp.identity(K)
    assert D.rows[0][1] == parse_op("Ds", K)
    assert D.rows[1][0].is_zero() and D.rows[1][1] == DiffOp.identity(K)


def test_psi_example():
    phi = DualElement(M, S0, [s, s * s])
    assert psi(S0, S0, M, phi) == phi
    out = psi(S0, S1, M, phi)
    assert out.coeffs == [-s, s * s]
    assert out.sigma == S1


def test_psi_rejects_wrong_field():
    with pytest.raises(FieldMismatchError):
        psi(S1, S0, M, DualElement(M, S0, [s, s]))


def test_dual_of_operators():
    phi = DualElement(M, S0, [s, s * s])
    assert dual_of_do(S0, ContinuousDO.identity(M))(phi) == phi
    a = parse_algebra_element("s + t", A)
    assert dual_of_do(S0, ContinuousDO.multiplication(M, a))(phi) == phi.acted(a)
    Ds, Z = parse_op("Ds", K), DiffOp.zero(K)
    D = ContinuousDO(M, M, DiffOpMatrix(K, [[Ds, Z], [Z, Ds]]))
    # phi(x_i) * Ds = -L_Ds(phi(x_i))
    assert dual_of_do(S0, D)(phi).coeffs == [-K.one(), -2 * s]


def test_residue_pairing_on_dual_basis():
    for j in range(2):
        delta = DualElement.basis_element(M, S0, j)
        for i, m in enumerate(A.basis):
            expected = Form.top(K.one() if i == j else K.zero())
            assert residue_pairing(A.monomial(m), delta) == expected
        assert residue_pairing(A.zero(), delta).is_zero()


def test_trace_examples():
    phi = DualElement(M, S0, [s, s * s])
    assert trace_map(BcaMorphism.identity(A), S0, phi) == phi
    field = ArtinianBca(K, (), [])
    f = BcaMorphism.structure(field, A)
    out = trace_map(f, CoeffField.canonical(field), DualElement(M, S0, [K.one(), K.zero()]))
    assert out.coeffs == [K.one()]


def test_dualizing_module_lengths():
    assert k_dualizing(ArtinianBca(K, (), [])).length == 1
    assert k_dualizing(parse_bca("bca B over Q(s) vars t ideal t^3")).length == 3


def test_evaluation_matrix_is_invertible():
    B = parse_bca("bca B over Q vars x,y ideal x^2,y^2")
    N = FinLenModule.from_bca(B)
    assert c_rank(evaluation_matrix(N), B.czero) == N.length


def test_f_sharp_examples():
    ident = BcaMorphism.identity(A)
    assert f_sharp(ident, M).length == M.length
    field = ArtinianBca(K, (), [])
    f = BcaMorphism.structure(field, A)
    assert f_sharp(f, FinLenModule.from_bca(field)).length == 2


def test_omega_complexes():
    field = ArtinianBca(K, (), [])
    cx = omega_complex(field)
    assert cx.lengths() == [1, 1]
    assert cx.differentials[0].matrix.rows[0][0] == parse_op("Ds", K)
    dual_numbers = omega_complex(parse_bca("bca C over Q vars t ideal t^2"))
    assert dual_numbers.lengths() == [2, 1]
    assert dual_numbers.check_d_squared() and dual_numbers.check_dual_squared()


def _random_setup(seed, max_length=8):
    rng = random.Random(seed)
    Kr = gen.rand_descriptor(rng)
    B = gen.rand_bca(rng, Kr, max_length)
    return rng, Kr, B, gen.rand_module(rng, B, max_length=max_length)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_coefficient_fields_are_ring_maps(seed):
    rng, Kr, B, _ = _random_setup(seed)
    sigma = gen.rand_sigma(rng, B)
    lam = gen.rand_laurent(rng, Kr, terms=2, lo=-2, hi=2)
    mu = gen.rand_laurent(rng, Kr, terms=2, lo=-2, hi=2)
    lhs = sigma_apply(sigma, lam * mu)
    rhs = B.mul(sigma_apply(sigma, lam), sigma_apply(sigma, mu))
    assert B.agrees(lhs, rhs)
    assert B.agrees(sigma_apply(sigma, lam + mu), B.add(sigma_apply(sigma, lam), sigma_apply(sigma, mu)))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_first_order_taylor_matches_sympy(seed):
    rng = random.Random(seed)
    c = gen.rand_coeff(rng, K.coeff_field)
    lam = K.const(c)
    got = sigma_apply(S1, lam)
    expected = sympy.diff(laurent_to_sym(lam), sympy.Symbol("s"))
    assert same(laurent_to_sym(got[1]), expected)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_psi_round_trip(seed):
    rng, _, B, N = _random_setup(seed)
    s1, s2 = gen.rand_sigma(rng, B), gen.rand_sigma(rng, B)
    phi = gen.rand_dual(rng, N, s1, fractions=False)
    back = psi(s2, s1, N, psi(s1, s2, N, phi))
    assert all(x.agrees(y) for x, y in zip(back.coeffs, phi.coeffs))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_dual_linear_in_the_coefficient_field(seed):
    rng, Kr, B, N = _random_setup(seed)
    sigma = gen.rand_sigma(rng, B)
    phi = gen.rand_dual(rng, N, sigma, fractions=False)
    lam = gen.rand_laurent(rng, Kr, terms=2, lo=-1, hi=2, fractions=False)
    i = rng.randrange(N.length)
    x = sigma_times(sigma, N, lam, N.unit(i))
    assert dual_eval_coeff(phi, x).agrees(lam * phi.coeffs[i])


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_double_dual_of_operators(seed):
    rng, _, B, N = _random_setup(seed, 6)
    P = gen.rand_module(rng, B, max_length=6)
    D = gen.rand_do(rng, N, P)

    def ev(module):
        return DiffOpMatrix.from_scalars(module.tlf, [[module.tlf.const(x) for x in r]
                                                      for r in evaluation_matrix(module)])

    lhs = dual_do(dual_do(D)).matrix.compose(ev(N))
    assert lhs.agrees(ev(P).compose(D.matrix))


def test_order_of_a_dual_operator_example():
    Ds = parse_op("Ds", K)
    D = ContinuousDO(M, M, DiffOpMatrix(K, [[Ds, DiffOp.zero(K)], [DiffOp.zero(K), Ds]]))
    assert bca_order(D) >= 1
    assert bca_order(dual_do(D)) <= bca_order(D)
    assert bca_order(ContinuousDO.identity(M)) == 0
