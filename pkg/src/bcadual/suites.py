"""Seeded property-verification suites.

Each suite checks one identity on randomly generated instances.  A case
function takes a ``random.Random`` and the run options and returns
``(ok, witness)``; the witness records the inputs, both sides, and where
possible ``eval`` command lines that recompute the pieces through the CLI.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import gen
from .bca.algebra import ArtinianBca, CoeffField
from .bca.derham import DeRhamComplex, _constant
from .bca.duals import (
    ContinuousDO,
    DualElement,
    DualMap,
    bca_order,
    dij_matrix,
    dual_do,
    dual_eval_coeff,
    dual_module,
    evaluation_matrix,
    psi,
)
from .bca.duals import sigma_times
from .bca.modules import FinLenModule
from .bca.traces import BcaMorphism, f_sharp, trace_gram_rank, trace_map
from .forms import Derivation, Form, bracket, exterior_d, lie_derivative, res_tower, residue
from .intensify import (
    Intensification,
    check_associativity,
    check_q_composite,
    check_square_psi,
    check_square_trace,
)
from .linalg import c_mul, c_rank
from .parsing import parse_descriptor
from .scalars import rational_functions, rationals
from .series import KummerStep, Laurent, LaurentStep, TlfDescriptor
from .weyl import DiffOp, DiffOpMatrix, do_apply, do_mul, do_order, right_action

SCHEMA = 1


@dataclass(frozen=True)
class Suite:
    name: str
    run: object
    summary: str
    default_cases: int


SUITES: dict = {}


def suite(name: str, summary: str, cases: int = 50):
    def register(fn):
        SUITES[name] = Suite(name, fn, summary, cases)
        return fn
    return register


def _s(x) -> str:
    return str(x)


def _verdict(ok: bool, inputs: dict, lhs, rhs, evals=None) -> tuple:
    witness = {"inputs": inputs, "lhs": _s(lhs), "rhs": _s(rhs)}
    if evals:
        witness["eval"] = evals
    return ok, witness


def _duals_agree(a: DualElement, b: DualElement) -> bool:
    return len(a.coeffs) == len(b.coeffs) and all(x.agrees(y) for x, y in zip(a.coeffs, b.coeffs))


def _coeff_list(xs) -> str:
    return "[" + ", ".join(str(x) for x in xs) + "]"


def _laurent_descriptor(rng: random.Random) -> TlfDescriptor:
    return gen.desc_laurent(rng.choice((1, 2)))


# -- series, forms, operators

@suite("integration-by-parts", "Res((D a) alpha) = Res(a (alpha * D)) for operators of order <= 3", 200)
def case_integration_by_parts(rng, opts):
    K = _laurent_descriptor(rng)
    D = gen.rand_op(rng, K, max_order=3)
    a = gen.rand_laurent(rng, K)
    alpha = gen.rand_top_form(rng, K)
    Da = do_apply(D, a)
    lhs_form = Form.top(Da * alpha.top_coeff())
    right = right_action(alpha, D)
    rhs_form = Form.top(a * right.top_coeff())
    lhs, rhs = residue(lhs_form), residue(rhs_form)
    evals = [
        f"apply ({D}) to {a} over {K}",
        f"res ({lhs_form}) over {K}",
        f"right ({alpha}) by ({D}) over {K}",
        f"res ({rhs_form}) over {K}",
    ]
    return _verdict(lhs == rhs, {"K": str(K), "D": str(D), "a": str(a), "alpha": str(alpha)}, lhs, rhs, evals)


@suite("residue-of-lie", "Res(L_{d/dt_j} alpha) = 0 for Laurent variables t_j", 200)
def case_residue_of_lie(rng, opts):
    K = gen.rand_descriptor(rng)
    if not K.vars:
        K = gen.desc_with_function(1)
    var = rng.choice(K.vars)
    alpha = gen.rand_top_form(rng, K)
    lie = lie_derivative(Derivation.partial(K, var), alpha)
    value = residue(lie)
    zero = Form.zero(value.tlf, value.degree)
    evals = [f"lie D{var} on {alpha} over {K}", f"res ({lie}) over {K}"]
    return _verdict(value.is_zero(), {"K": str(K), "var": var, "alpha": str(alpha)}, value, zero, evals)


@suite("cartan-calculus", "[L, d] = 0, L_[a,b] = [L_a, L_b], L_{f a}(alpha) = L_a(f alpha) on top forms", 100)
def case_cartan(rng, opts):
    K = gen.rand_descriptor(rng)
    d1, d2 = gen.rand_derivation(rng, K), gen.rand_derivation(rng, K)
    alpha = gen.rand_form(rng, K)
    inputs = {"K": str(K), "d1": str(d1), "d2": str(d2), "alpha": str(alpha)}
    # L commutes with d
    a1 = lie_derivative(d1, exterior_d(alpha))
    b1 = exterior_d(lie_derivative(d1, alpha))
    if not a1.agrees(b1):
        inputs["check"] = "commutes-with-d"
        evals = [f"lie ({d1}) on ({exterior_d(alpha)}) over {K}", f"d ({lie_derivative(d1, alpha)}) over {K}"]
        return _verdict(False, inputs, a1, b1, evals)
    # Lie algebra homomorphism
    a2 = lie_derivative(bracket(d1, d2), alpha)
    b2 = lie_derivative(d1, lie_derivative(d2, alpha)) - lie_derivative(d2, lie_derivative(d1, alpha))
    if not a2.agrees(b2):
        inputs["check"] = "bracket"
        return _verdict(False, inputs, a2, b2)
    # L_{f d}(w) = L_d(f w) for top forms w
    f = gen.rand_laurent(rng, K, terms=rng.randint(1, 3), lo=-2, hi=2)
    top = gen.rand_top_form(rng, K)
    a3 = lie_derivative(d1.scale(f), top)
    b3 = lie_derivative(d1, top.scale(f))
    inputs.update(f=str(f), top=str(top), check="top-form-scaling")
    return _verdict(a3.agrees(b3), inputs, a3, b3)


@suite("weyl-normal-ordering", "(D E)(a) = D(E(a)) for normal-ordered products", 200)
def case_weyl(rng, opts):
    K = gen.rand_descriptor(rng)
    D, E = gen.rand_op(rng, K), gen.rand_op(rng, K)
    a = gen.rand_laurent(rng, K)
    DE = do_mul(D, E)
    lhs = do_apply(DE, a)
    rhs = do_apply(D, do_apply(E, a))
    evals = [f"({D})*({E}) over {K}", f"apply ({DE}) to {a} over {K}",
             f"apply ({E}) to {a} over {K}"]
    return _verdict(lhs == rhs, {"K": str(K), "D": str(D), "E": str(E), "a": str(a)}, lhs, rhs, evals)


# -- Psi and D_ij

def _bca_setup(rng, K=None, max_length: int = 12):
    K = K or gen.rand_descriptor(rng)
    A = gen.rand_bca(rng, K, max_length)
    return K, A


def _bca_inputs(A, M=None, **fields) -> dict:
    out = {"A": str(A)}
    if M is not None:
        out["module"] = repr(M)
    out.update({k: str(v) for k, v in fields.items()})
    return out


@suite("psi-inverse", "Psi_{s',s} Psi_{s,s'} = id and Psi_{s,s''} = Psi_{s',s''} Psi_{s,s'}", 100)
def case_psi_inverse(rng, opts):
    K, A = _bca_setup(rng)
    M = gen.rand_module(rng, A)
    s1, s2, s3 = gen.rand_sigma(rng, A), gen.rand_sigma(rng, A), gen.rand_sigma(rng, A)
    phi = gen.rand_dual(rng, M, s1)
    forward = psi(s1, s2, M, phi)
    back = psi(s2, s1, M, forward)
    inputs = _bca_inputs(A, M, sigma=s1, sigma2=s2, phi=phi)
    if not _duals_agree(back, phi):
        inputs["check"] = "inverse"
        return _verdict(False, inputs, back, phi)
    direct = psi(s1, s3, M, phi)
    stepped = psi(s2, s3, M, forward)
    inputs.update(sigma3=str(s3), check="composition")
    return _verdict(_duals_agree(direct, stepped), inputs, direct, stepped)


@suite("psi-basis-independence", "Psi computed in two filtered bases gives the same functional", 100)
def case_psi_basis(rng, opts):
    K, A = _bca_setup(rng)
    M = gen.rand_module(rng, A)
    Q = gen.rand_filtered_change(rng, M)
    M2 = M.rebased(Q)
    s1, s2 = gen.rand_sigma(rng, A), gen.rand_sigma(rng, A)
    phi = gen.rand_dual(rng, M, s1)
    n = M.length
    # phi(x'_i) = sum_k Q[k][i] phi(x_k): constants pass through any coefficient field
    coeffs2 = [sum((phi.coeffs[k] * Q[k][i] for k in range(n) if Q[k][i]), K.zero()) for i in range(n)]
    phi2 = DualElement(M2, s1, coeffs2)
    psi1 = psi(s1, s2, M, phi)
    psi2 = psi(s1, s2, M2, phi2)
    expected = [sum((psi1.coeffs[k] * Q[k][i] for k in range(n) if Q[k][i]), K.zero()) for i in range(n)]
    ok = all(a.agrees(b) for a, b in zip(psi2.coeffs, expected))
    inputs = _bca_inputs(A, M, sigma=s1, sigma2=s2, phi=phi, change=Q)
    return _verdict(ok, inputs, _coeff_list(psi2.coeffs), _coeff_list(expected))


@suite("dij-triangular", "D_ii = 1, D_ij = 0 below the diagonal levels, ord D_ij <= 2 max(-1, ord x_j - ord x_i)", 100)
def case_dij(rng, opts):
    K, A = _bca_setup(rng)
    M = gen.rand_module(rng, A)
    s1, s2 = gen.rand_sigma(rng, A), gen.rand_sigma(rng, A)
    D = dij_matrix(s1, s2, M)
    inputs = _bca_inputs(A, M, sigma=s1, sigma2=s2)
    ident = DiffOp.identity(K)
    for i in range(M.length):
        for j in range(M.length):
            P = D.rows[i][j]
            bound = 2 * max(-1, M.ords[j] - M.ords[i])
            if i == j and not P.agrees(ident):
                inputs["entry"] = f"{i},{j}"
                return _verdict(False, inputs, P, ident)
            if i != j and bound < 0 and not P.is_zero():
                inputs["entry"] = f"{i},{j}"
                return _verdict(False, inputs, P, 0)
            if bound >= 0 and do_order(P) > bound:
                inputs["entry"] = f"{i},{j}"
                return _verdict(False, inputs, f"order {do_order(P)}", f"bound {bound}")
    # defining identity on a random lambda, through the Taylor action of each field
    lam = gen.rand_laurent(rng, K, terms=rng.randint(1, 3), lo=-2, hi=3)
    for i in rng.sample(range(M.length), min(2, M.length)):
        lhs = sigma_times(s2, M, lam, M.unit(i))
        rhs = M.zero_vector()
        for j in range(M.length):
            if not D.rows[i][j].is_zero():
                part = sigma_times(s1, M, do_apply(D.rows[i][j], lam), M.unit(j))
                rhs = [x + y for x, y in zip(rhs, part)]
        if not all(x.agrees(y) for x, y in zip(lhs, rhs)):
            inputs.update(row=str(i), lam=str(lam))
            return _verdict(False, inputs, _coeff_list(lhs), _coeff_list(rhs))
    return _verdict(True, inputs, D, "unitriangular")


@suite("psi-residue-compat",
       "Res_{L/K} . Psi_{tau,tau'}(phi) = Res_{L/K} . phi when tau, tau' agree on K", 50)
def case_psi_residue(rng, opts):
    K = rng.choice((gen.desc_laurent(1), TlfDescriptor(rational_functions(rationals(), ("s",)), ())))
    step = LaurentStep(K, "u")
    L = step.target
    B = gen.rand_bca(rng, L, 8)
    M = gen.rand_module(rng, B)
    shared = {v: gen.rand_nilpotent(rng, B, 0.4) for v in K.all_vars if rng.random() < 0.8}
    t1 = CoeffField(B, dict(shared, u=gen.rand_nilpotent(rng, B, 0.4)))
    t2 = CoeffField(B, dict(shared, u=gen.rand_nilpotent(rng, B, 0.4)))
    phi = gen.rand_dual(rng, M, t1)
    moved = psi(t1, t2, M, phi)
    x = [gen.rand_laurent(rng, L, terms=rng.randint(1, 2), lo=-2, hi=2) for _ in range(M.length)]
    lhs = res_tower(Form.top(dual_eval_coeff(moved, x)), [step])
    rhs = res_tower(Form.top(dual_eval_coeff(phi, x)), [step])
    inputs = _bca_inputs(B, M, tau=t1, tau2=t2, phi=phi, x=_coeff_list(x))
    return _verdict(lhs.agrees(rhs), inputs, lhs, rhs)


# -- Matlis duality

@suite("matlis-duality", "dim Dual M = dim M and evaluation M -> Dual Dual M is an A-isomorphism", 50)
def case_matlis(rng, opts):
    K, A = _bca_setup(rng)
    M = gen.rand_module(rng, A)
    if rng.random() < 0.5:
        M = M.rebased(gen.rand_filtered_change(rng, M))
    DM = dual_module(M)
    DDM = dual_module(DM.module)
    inputs = _bca_inputs(A, M)
    if DM.length != M.length or DDM.length != M.length:
        return _verdict(False, inputs, [M.length, DM.length, DDM.length], "equal lengths")
    EV = evaluation_matrix(M)
    zero = A.czero
    rank = c_rank(EV, zero)
    if rank != M.length:
        return _verdict(False, inputs, f"rank {rank}", f"rank {M.length}")
    for j, (Nm, Nd) in enumerate(zip(M.actions, DDM.module.actions)):
        lhs, rhs = c_mul(EV, Nm, zero), c_mul(Nd, EV, zero)
        if lhs != rhs:
            inputs["variable"] = A.nilp_vars[j]
            return _verdict(False, inputs, lhs, rhs)
    return _verdict(True, inputs, EV, "invertible, A-linear")


# -- traces

def _fresh(names, stem: str) -> str:
    k = 1
    while f"{stem}{k}" in names:
        k += 1
    return f"{stem}{k}"


def rand_morphism(rng: random.Random, A: ArtinianBca, finite: bool = False, max_length: int = 12) -> BcaMorphism:
    """A -> B: an optional coefficient step, then extra or truncated nilpotents; images are scalings."""
    K = A.coeff_tlf
    kinds = ["none", "kummer"] if finite else ["none", "laurent", "kummer"]
    if not K.vars:
        kinds.remove("kummer")
    kind = rng.choice(kinds)
    tower = []
    if kind == "laurent":
        tower.append(LaurentStep(K, _fresh(K.all_vars, "u")))
    elif kind == "kummer":
        var = rng.choice(K.vars)
        tower.append(KummerStep(K, var, _fresh(K.all_vars, "u"), rng.choice((1, 2, 3)), (rng.choice((1, 2, -1)),)))
    L = tower[-1].target if tower else K
    r = len(A.nilp_vars)
    gens = [tuple(g) for g in A.ideal]
    names = list(A.nilp_vars)
    if rng.random() < 0.5 and len(names) < 3 and A.length * 2 <= max_length:
        new = _fresh(names, "z")
        names.append(new)
        gens = [g + (0,) for g in gens] + [(0,) * r + (2,)]
    elif r and rng.random() < 0.5:
        # truncate: add x_j^k with k at most the current top
        j = rng.randrange(r)
        g = [0] * len(names)
        g[j] = rng.randint(1, 3)
        gens.append(tuple(g))
    B = ArtinianBca(L, names, gens)
    images = {}
    for v in A.nilp_vars:
        images[v] = B.scale(B.var(v), L.const(rng.choice((1, 1, 2, -1))))
    try:
        return BcaMorphism(A, B, tower, images)
    except ValueError:
        return BcaMorphism(A, B, tower, {v: B.var(v) for v in A.nilp_vars})


def _trace_base(rng, max_length: int = 4):
    K = rng.choice((gen.desc_laurent(1), gen.desc_with_function(1),
                    TlfDescriptor(rational_functions(rationals(), ("s",)), ())))
    if rng.random() < 0.25:
        return K, ArtinianBca(K, (), [])
    return K, gen.rand_bca(rng, K, max_length)


@suite("trace-transitivity", "Tr_{C/A} = Tr_{B/A} . Tr_{C/B} on random two-step towers", 50)
def case_trace_transitivity(rng, opts):
    K, A = _trace_base(rng, 3)
    f = rand_morphism(rng, A, max_length=6)
    g = rand_morphism(rng, f.target, max_length=12)
    C = g.target
    sigma = gen.rand_sigma(rng, A)
    sigma_B = gen.rand_sigma(rng, f.target)
    chi = gen.rand_dual(rng, FinLenModule.from_bca(C), CoeffField.canonical(C))
    lhs = trace_map(f.compose(g), sigma, chi)
    rhs = trace_map(f, sigma, trace_map(g, sigma_B, chi))
    inputs = {"f": str(f), "g": str(g), "sigma": str(sigma), "sigma_B": str(sigma_B), "chi": str(chi)}
    return _verdict(_duals_agree(lhs, rhs), inputs, lhs, rhs)


@suite("trace-nondegeneracy", "the trace pairing B x K(B) -> K(A) has a full-rank Gram matrix", 50)
def case_trace_nondegeneracy(rng, opts):
    K, A = _trace_base(rng, 3)
    f = rand_morphism(rng, A, finite=True, max_length=6)
    sigma = gen.rand_sigma(rng, A)
    L = f.target.coeff_tlf
    basis_L = [L.one()]
    for step in f.tower:
        j = step.position
        basis_L = []
        for k in range(step.e):
            e = [0] * L.dim
            e[j] = k
            basis_L.append(L.monomial(tuple(e)))
    rank, expected, exact = trace_gram_rank(f, sigma, basis_L)
    inputs = {"f": str(f), "sigma": str(sigma), "basis_L": _coeff_list(basis_L)}
    return _verdict(exact and rank == expected, inputs, f"rank {rank}", f"rank {expected}")


@suite("trace-sigma-independence", "Tr_{B/A; sigma} does not depend on sigma", 50)
def case_trace_sigma(rng, opts):
    K, A = _trace_base(rng, 4)
    f = rand_morphism(rng, A)
    s1, s2 = gen.rand_sigma(rng, A), gen.rand_sigma(rng, A)
    B = f.target
    phi = gen.rand_dual(rng, FinLenModule.from_bca(B), gen.rand_sigma(rng, B))
    lhs, rhs = trace_map(f, s1, phi), trace_map(f, s2, phi)
    inputs = {"f": str(f), "sigma": str(s1), "sigma2": str(s2), "phi": str(phi)}
    return _verdict(_duals_agree(lhs, rhs), inputs, lhs, rhs)


@suite("trace-linearity", "Tr(f(a) phi) = a Tr(phi)", 50)
def case_trace_linearity(rng, opts):
    K, A = _trace_base(rng, 4)
    f = rand_morphism(rng, A)
    B = f.target
    sigma = gen.rand_sigma(rng, A)
    phi = gen.rand_dual(rng, FinLenModule.from_bca(B), CoeffField.canonical(B))
    a = A.const(gen.rand_laurent(rng, K, terms=1, lo=-1, hi=1))
    if A.length > 1:
        a = A.add(a, gen.rand_nilpotent(rng, A))
    lhs = trace_map(f, sigma, phi.acted(f.apply(a)))
    rhs = trace_map(f, sigma, phi).acted(a)
    inputs = {"f": str(f), "sigma": str(sigma), "phi": str(phi), "a": A.format_element(a)}
    return _verdict(_duals_agree(lhs, rhs), inputs, lhs, rhs)


@suite("f-sharp-dimension", "f_# K(A) has the length of K(B)", 20)
def case_f_sharp(rng, opts):
    K = rng.choice((gen.desc_laurent(1), TlfDescriptor(rationals(), ())))
    A = gen.rand_bca(rng, K, 4) if rng.random() < 0.7 else ArtinianBca(K, (), [])
    f = rand_morphism(rng, A, finite=True, max_length=8)
    if f.tower:
        f = BcaMorphism(A, ArtinianBca(K, f.target.nilp_vars, f.target.ideal), (),
                        {v: ArtinianBca(K, f.target.nilp_vars, f.target.ideal).var(v) for v in A.nilp_vars})
    KA = dual_module(FinLenModule.from_bca(A)).module
    out = f_sharp(f, KA)
    KB = dual_module(FinLenModule.from_bca(f.target)).module
    return _verdict(out.length == KB.length, {"f": str(f)}, out.length, KB.length)


# -- base change along intensifications

def _intensify_base(rng, two: bool = False):
    names = ("r", "s") if two else ("s",)
    F = rational_functions(rationals(), names)
    K = TlfDescriptor(F, ("t",) if rng.random() < 0.5 else ())
    return K


def _rand_window(opts) -> int:
    return max(12, opts.get("window") or 12)


def _rand_phis(rng, M, sigma, count=2):
    return [gen.rand_dual(rng, M, sigma) for _ in range(count)]


@suite("psi-square", "Psi-hat . q_sigma = q_sigma' . Psi along k(s) -> k((s))", 50)
def case_psi_square(rng, opts):
    K = _intensify_base(rng)
    u = Intensification(K, "s", _rand_window(opts))
    A = gen.rand_bca(rng, K, 8)
    M = gen.rand_module(rng, A)
    s1, s2 = gen.rand_sigma(rng, A), gen.rand_sigma(rng, A)
    rep = check_square_psi(u, s1, s2, M, _rand_phis(rng, M, s1))
    return _report_verdict(rep, _bca_inputs(A, M, sigma=s1, sigma2=s2, window=u.window))


@suite("trace-square", "q_u . Tr_{B/A} = Tr_{B-hat/A-hat} . q_v", 50)
def case_trace_square(rng, opts):
    K = _intensify_base(rng)
    u = Intensification(K, "s", _rand_window(opts))
    A = gen.rand_bca(rng, K, 4) if rng.random() < 0.8 else ArtinianBca(K, (), [])
    f = rand_morphism(rng, A, max_length=8)
    sigma = gen.rand_sigma(rng, A)
    B = f.target
    rep = check_square_trace(f, u, _rand_phis(rng, FinLenModule.from_bca(B), CoeffField.canonical(B)), sigma)
    return _report_verdict(rep, {"f": str(f), "sigma": str(sigma), "window": str(u.window)})


@suite("q-composite", "q over two stacked intensifications equals q of the composite", 50)
def case_q_composite(rng, opts):
    K = _intensify_base(rng, two=True)
    window = _rand_window(opts)
    first = rng.choice(("r", "s"))
    u = Intensification(K, first, window)
    w = Intensification(u.target, "s" if first == "r" else "r", window)
    A = gen.rand_bca(rng, K, 8)
    M = gen.rand_module(rng, A)
    sigma = gen.rand_sigma(rng, A)
    rep = check_q_composite(u, w, sigma, M, _rand_phis(rng, M, sigma))
    return _report_verdict(rep, _bca_inputs(A, M, sigma=sigma, order=f"{u.promote[0]} then {w.promote[0]}"))


@suite("associativity", "iterated and composite base changes agree; quotients commute with promotion", 50)
def case_associativity(rng, opts):
    K = _intensify_base(rng, two=True)
    window = _rand_window(opts)
    first = rng.choice(("r", "s"))
    u = Intensification(K, first, window)
    w = Intensification(u.target, "s" if first == "r" else "r", window)
    A = gen.rand_bca(rng, K, 8)
    sigma = gen.rand_sigma(rng, A)
    r = len(A.nilp_vars)
    quotient = [tuple(rng.randint(0, 2) if i == j else 0 for i in range(r)) for j in range(rng.randint(0, r))]
    quotient = [g for g in quotient if any(g)]
    rep = check_associativity(A, u, w, sigma, quotient or None)
    return _report_verdict(rep, {"A": str(A), "sigma": str(sigma), "quotient": str(quotient)})


def _report_verdict(rep, inputs) -> tuple:
    bad = [c for c in rep.cases if c["verdict"] != "pass"]
    if bad:
        c = bad[0]
        inputs = dict(inputs, **c["inputs"])
        return _verdict(False, inputs, c["lhs"], c["rhs"])
    last = rep.cases[-1] if rep.cases else {"lhs": "", "rhs": ""}
    return _verdict(True, inputs, last["lhs"], last["rhs"])


# -- duals of differential operators

# operator matrices are (length x length) with Weyl entries; composites square the cost
DO_MODULE_LENGTH = 6


def _do_setup(rng, K=None):
    K = K or gen.rand_descriptor(rng)
    A = gen.rand_bca(rng, K, 6)
    M, N = gen.rand_module(rng, A, max_length=DO_MODULE_LENGTH), gen.rand_module(rng, A, max_length=DO_MODULE_LENGTH)
    return K, A, M, N


@suite("dual-do-transitivity", "Dual(E . D) = Dual(D) . Dual(E)", 100)
def case_dual_do_transitivity(rng, opts):
    K, A, M, N = _do_setup(rng)
    P = gen.rand_module(rng, A, max_length=DO_MODULE_LENGTH)
    # sparse factors: the composite is already dense
    D, E = gen.rand_do(rng, M, N, density=0.25), gen.rand_do(rng, N, P, density=0.25)
    sigma = gen.rand_sigma(rng, A)
    phi = gen.rand_dual(rng, P, sigma, fractions=False)
    lhs = DualMap(E.compose(D), sigma)(phi)
    rhs = DualMap(D, sigma)(DualMap(E, sigma)(phi))
    inputs = _bca_inputs(A, sigma=sigma, D=D, E=E, phi=phi)
    if not _duals_agree(lhs, rhs):
        return _verdict(False, inputs, lhs, rhs)
    composite = dual_do(E.compose(D))
    chained = dual_do(D).compose(dual_do(E))
    return _verdict(composite.matrix.agrees(chained.matrix), inputs, composite, chained)


@suite("dual-do-linearity", "for A-linear D, Dual(D)(phi) = phi . D", 100)
def case_dual_do_linearity(rng, opts):
    K, A, M, _ = _do_setup(rng)
    a = A.add(A.const(gen.rand_laurent(rng, K, terms=1, lo=-1, hi=1)), gen.rand_nilpotent(rng, A))
    D = ContinuousDO.multiplication(M, a)
    sigma = gen.rand_sigma(rng, A)
    phi = gen.rand_dual(rng, M, sigma)
    lhs = DualMap(D, sigma)(phi)
    rhs = phi.acted(a)
    return _verdict(_duals_agree(lhs, rhs), _bca_inputs(A, M, sigma=sigma, a=A.format_element(a), phi=phi), lhs, rhs)


@suite("dual-do-adjoint", "Res Dual(D)(phi)(x) = Res phi(D x) over pure Laurent K", 100)
def case_dual_do_adjoint(rng, opts):
    K = _laurent_descriptor(rng)
    _, A, M, N = _do_setup(rng, K)
    D = gen.rand_do(rng, M, N)
    sigma = gen.rand_sigma(rng, A)
    phi = gen.rand_dual(rng, N, sigma)
    via_forms = rng.random() < 0.5
    dual_phi = DualMap(D, sigma, via_forms)(phi)
    i = rng.randrange(M.length)
    lam = gen.rand_laurent(rng, K, terms=rng.randint(1, 3), lo=-2, hi=2)
    x = sigma_times(sigma, M, lam, M.unit(i))
    lhs = residue(Form.top(dual_eval_coeff(dual_phi, x)))
    rhs = residue(Form.top(dual_eval_coeff(phi, D.apply(x))))
    inputs = _bca_inputs(A, sigma=sigma, D=D, phi=phi, lam=lam, basis=i, via_forms=via_forms)
    return _verdict(lhs == rhs, inputs, lhs, rhs)


@suite("dual-do-double-dual", "D^vv . EV_M = EV_N . D", 100)
def case_double_dual(rng, opts):
    K, A, M, N = _do_setup(rng)
    D = gen.rand_do(rng, M, N)
    DD = dual_do(dual_do(D))
    tlf = M.tlf

    def const(mat):
        return DiffOpMatrix.from_scalars(tlf, [[tlf.const(x) for x in row] for row in mat])

    lhs = DD.matrix.compose(const(evaluation_matrix(M)))
    rhs = const(evaluation_matrix(N)).compose(D.matrix)
    return _verdict(lhs.agrees(rhs), _bca_inputs(A, D=D), lhs, rhs)


@suite("dual-do-order", "ord_A Dual(D) <= ord_A D", 100)
def case_dual_do_order(rng, opts):
    K, A, M, N = _do_setup(rng)
    D = gen.rand_do(rng, M, N, density=0.25)
    lhs, rhs = bca_order(dual_do(D)), bca_order(D)
    return _verdict(lhs <= rhs, _bca_inputs(A, D=D), f"order {lhs}", f"order {rhs}")


# -- de Rham duals

def complex_cohomology(lengths, matrices) -> list:
    """dim H^q of a complex of prime-field vector spaces; matrices[q] maps degree q to q+1."""
    out = []
    ranks = [c_rank(m, 0) if m and m[0] else 0 for m in matrices]
    for q, n in enumerate(lengths):
        r_out = ranks[q] if q < len(ranks) else 0
        r_in = ranks[q - 1] if q >= 1 else 0
        out.append(n - r_out - r_in)
    return out


def _constant_rows(D: ContinuousDO) -> list:
    return [[_constant(P) for P in row] for row in D.matrix.rows]


@suite("derham-duals", "dual de Rham complex squares to zero; H(Omega) and H(Dual Dual Omega) agree", 20)
def case_derham(rng, opts):
    K = TlfDescriptor(rationals(), ())
    A = gen.rand_bca(rng, K, 6)
    cx = DeRhamComplex(A)
    inputs = {"A": str(A), "lengths": str(cx.lengths())}
    if not cx.check_d_squared():
        return _verdict(False, inputs, "d.d != 0", "d.d = 0")
    if not cx.check_dual_squared():
        return _verdict(False, inputs, "Dual(d).Dual(d) != 0", "Dual(d).Dual(d) = 0")
    h = cx.cohomology_dims()
    doubles = [dual_do(dual_do(d)) for d in cx.differentials]
    lengths = [dual_module(dual_module(M).module).length for M in cx.modules]
    hdd = complex_cohomology(lengths, [_constant_rows(d) for d in doubles])
    return _verdict(h == hdd, inputs, h, hdd)


# -- single-case checks

@suite("intensify-descriptor", "k(s)((t)) base-changed along k(s)[[t]] -> k((s))[[t]] is k((s))((t))", 1)
def case_intensify_descriptor(rng, opts):
    K = parse_descriptor("Q(s)((t))")
    lhs = Intensification(K, "s").target
    rhs = parse_descriptor("Q((s))((t))")
    return _verdict(lhs == rhs, {"K": str(K)}, lhs, rhs, [f"expand 1/(1-s) over {K} promote s"])


A1_FORMS = ("dt/t", "dt", "dt/t^2")


def a1_residue_functional(form_text: str, levels: int = 4, window: int = 12) -> list:
    """Values on 1, t, ..., t^(levels-1) of the functional a form of k(t) induces on k[t]/(t^levels).

    The form is expanded along k(t) -> k((t)) and paired through the residue.
    """
    from .parsing import parse_form
    Kt = TlfDescriptor(rational_functions(rationals(), ("t",)), ())
    alpha = parse_form(form_text, Kt)
    u = Intensification(Kt, "t", window)
    hat = u.expand_form(alpha)
    T = u.target
    t = T.var("t")
    out = []
    power = T.one()
    for _ in range(levels):
        c = residue(Form.top(power * hat.top_coeff())).top_coeff().terms.get((), Fraction(0))
        out.append(c)
        power = power * t
    return out


A1_EXPECTED = {"dt/t": [1, 0, 0, 0], "dt": [0, 0, 0, 0], "dt/t^2": [0, 1, 0, 0]}


@suite("a1-demo", "dt/t gives the functional dual to 1, dt gives zero, dt/t^2 hits t", 1)
def case_a1(rng, opts):
    got = {f: a1_residue_functional(f) for f in A1_FORMS}
    ok = all(got[f] == A1_EXPECTED[f] for f in A1_FORMS)
    return _verdict(ok, {"forms": list(A1_FORMS)}, {f: [str(c) for c in v] for f, v in got.items()},
                    A1_EXPECTED)


# -- running

def case_rng(name: str, seed: int, index: int) -> random.Random:
    return random.Random(f"{name}:{seed}:{index}")


def run_case(name: str, seed: int, index: int, opts=None) -> dict:
    s = SUITES[name]
    opts = opts or {}
    rng = case_rng(name, seed, index)
    try:
        ok, witness = s.run(rng, opts)
    except Exception as exc:  # a crash is a failing case with its reason recorded
        ok, witness = False, {"error": f"{type(exc).__name__}: {exc}"}
    if ok:
        return {"index": index, "verdict": "pass"}
    return {"index": index, "verdict": "fail", "witness": witness}


def run_suite(name: str, seed: int = 0, cases: int | None = None, window: int | None = None) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    s = SUITES[name]
    n = s.default_cases if cases is None else cases
    opts = {"window": window}
    results = [run_case(name, seed, i, opts) for i in range(n)]
    passed = sum(r["verdict"] == "pass" for r in results)
    return {
        "schema": SCHEMA,
        "suite": name,
        "seed": seed,
        "cases": n,
        "window": window,
        "passed": passed,
        "failed": n - passed,
        "ok": passed == n,
        "results": results,
    }
