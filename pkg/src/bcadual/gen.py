"""Random instances for the verification suites.

Supports stay small: at most 6 terms, exponents in [-4, 4], nilpotency
degree at most 4, at most 2 Laurent and 1 function variable.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .bca.algebra import ArtinianBca, CoeffField
from .bca.duals import ContinuousDO, DualElement
from .bca.modules import FinLenModule
from .forms import Derivation, Form
from .scalars import rational_functions, rationals
from .series import Laurent, TlfDescriptor
from .weyl import DiffOp, DiffOpMatrix

EXP_RANGE = (-4, 4)
MAX_TERMS = 6


def rand_rational(rng: random.Random, allow_zero: bool = False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-5, 5), rng.choice((1, 1, 1, 2, 3)))
        if q or allow_zero:
            return q


def rand_coeff(rng: random.Random, F, fractions: bool = True):
    """A small element of F: a rational, or a low-degree polynomial in the function variable."""
    if F.kind == "rational_functions" and rng.random() < 0.6:
        s = F.gen(F.vars[0])
        out = F.coerce(rand_rational(rng))
        for k in range(1, rng.randint(1, 2) + 1):
            if rng.random() < 0.6:
                out = out + F.coerce(rand_rational(rng)) * s ** k
        if fractions and rng.random() < 0.25:
            out = out / (F.one + F.coerce(rng.randint(1, 3)) * s)
        return out if out else F.one
    return F.coerce(rand_rational(rng))


def rand_laurent(rng: random.Random, tlf: TlfDescriptor, terms: int | None = None,
                 lo: int = EXP_RANGE[0], hi: int = EXP_RANGE[1], fractions: bool = True) -> Laurent:
    n = rng.randint(1, MAX_TERMS) if terms is None else terms
    d = {}
    for _ in range(n):
        e = tuple(rng.randint(lo, hi) for _ in range(tlf.dim))
        d[e] = rand_coeff(rng, tlf.coeff_field, fractions)
    return Laurent(tlf, d)


def rand_top_form(rng: random.Random, tlf: TlfDescriptor) -> Form:
    return Form.top(rand_laurent(rng, tlf))


def rand_form(rng: random.Random, tlf: TlfDescriptor, degree: int | None = None) -> Form:
    n = len(tlf.all_vars)
    q = rng.randint(0, n) if degree is None else degree
    from itertools import combinations
    keys = list(combinations(range(n), q))
    comps = {}
    for key in rng.sample(keys, min(len(keys), rng.randint(1, 2))):
        comps[key] = rand_laurent(rng, tlf, terms=rng.randint(1, 3))
    return Form(tlf, q, comps)


def rand_derivation(rng: random.Random, tlf: TlfDescriptor) -> Derivation:
    coeffs = {}
    for v in tlf.all_vars:
        if rng.random() < 0.7:
            coeffs[v] = rand_laurent(rng, tlf, terms=rng.randint(1, 2), lo=-2, hi=2)
    if not coeffs:
        coeffs[tlf.all_vars[0]] = tlf.one()
    return Derivation(tlf, coeffs)


def rand_op(rng: random.Random, tlf: TlfDescriptor, max_order: int = 3, terms: int | None = None,
            fractions: bool = True) -> DiffOp:
    n = len(tlf.all_vars)
    k = rng.randint(1, 4) if terms is None else terms
    out = {}
    for _ in range(k):
        order = rng.randint(0, max_order)
        beta = [0] * n
        for _ in range(order):
            beta[rng.randrange(n)] += 1
        out[tuple(beta)] = rand_laurent(rng, tlf, terms=rng.randint(1, 2), lo=-2, hi=3, fractions=fractions)
    return DiffOp(tlf, out)


# -- descriptors

def desc_laurent(n: int = 1) -> TlfDescriptor:
    names = ("t",) if n == 1 else tuple(f"t{i + 1}" for i in range(n))
    return TlfDescriptor(rationals(), names)


def desc_with_function(n_laurent: int = 1) -> TlfDescriptor:
    F = rational_functions(rationals(), ("s",))
    names = ("t",) if n_laurent == 1 else tuple(f"t{i + 1}" for i in range(n_laurent))
    return TlfDescriptor(F, names[:n_laurent])


def rand_descriptor(rng: random.Random) -> TlfDescriptor:
    choice = rng.randrange(4)
    if choice == 0:
        return TlfDescriptor(rational_functions(rationals(), ("s",)), ())
    if choice == 1:
        return desc_with_function(1)
    if choice == 2:
        return desc_laurent(1)
    return desc_laurent(2)


# -- algebras and modules

def rand_bca(rng: random.Random, K: TlfDescriptor, max_length: int = 12, names=("x", "y")) -> ArtinianBca:
    while True:
        r = rng.randint(1, len(names))
        pure = [rng.randint(2, 4) for _ in range(r)]
        gens = []
        for j, a in enumerate(pure):
            g = [0] * r
            g[j] = a
            gens.append(tuple(g))
        if r == 2 and rng.random() < 0.5:
            gens.append((rng.randint(1, pure[0] - 1), rng.randint(1, pure[1] - 1)))
        A = ArtinianBca(K, names[:r], gens)
        if A.length <= max_length:
            return A


def rand_nilpotent(rng: random.Random, A: ArtinianBca, density: float = 0.5):
    """A random element of the maximal ideal, with polynomial coefficients.

    Coefficient-field corrections are differentiated up to the nilpotency
    degree; keeping them polynomial in the function variable bounds the cost.
    """
    tlf = A.coeff_tlf
    x = A.zero()
    for i, m in enumerate(A.basis):
        if i and rng.random() < density:
            x[i] = rand_laurent(rng, tlf, terms=1, lo=-1, hi=2, fractions=False)
    if A.is_zero(x) and A.length > 1:
        x[rng.randrange(1, A.length)] = tlf.one()
    return x


def rand_sigma(rng: random.Random, A: ArtinianBca) -> CoeffField:
    eps = {}
    for v in A.coeff_tlf.all_vars:
        if rng.random() < 0.8:
            eps[v] = rand_nilpotent(rng, A, 0.4)
    return CoeffField(A, eps)


def rand_module(rng: random.Random, A: ArtinianBca, max_summands: int = 2,
                max_length: int = 12) -> FinLenModule:
    """A sum of cyclic monomial quotients A/J; summands are dropped to respect ``max_length``."""
    k = rng.randint(1, max_summands)
    ideals = []
    r = len(A.nilp_vars)
    for _ in range(k):
        J = []
        if r and rng.random() < 0.5:
            g = [0] * r
            g[rng.randrange(r)] = rng.randint(1, 2)
            J.append(tuple(g))
        ideals.append(J)
    M = FinLenModule.cyclic_sum(A, ideals)
    while M.length > max_length and len(ideals) > 1:
        ideals.pop()
        M = FinLenModule.cyclic_sum(A, ideals)
    return M


def rand_filtered_change(rng: random.Random, M: FinLenModule):
    """Unitriangular constant basis change respecting the filtration."""
    zero, one = M.bca.czero, M.bca.cone
    n = M.length
    Q = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(k):
            if M.ords[k] >= M.ords[i] and rng.random() < 0.4:
                Q[k][i] = zero + rng.randint(-2, 2)
    return Q


def rand_dual(rng: random.Random, M: FinLenModule, sigma: CoeffField, fractions: bool = True) -> DualElement:
    tlf = M.tlf
    return DualElement(M, sigma, [rand_laurent(rng, tlf, terms=rng.randint(1, 3), fractions=fractions)
                                  for _ in range(M.length)])


def rand_do(rng: random.Random, M: FinLenModule, N: FinLenModule, max_order: int = 1,
            density: float = 0.35) -> ContinuousDO:
    """Random operator matrix with polynomial coefficients in the function variable."""
    tlf = M.tlf
    rows = []
    for _ in range(N.length):
        row = []
        for _ in range(M.length):
            if rng.random() < density:
                row.append(rand_op(rng, tlf, max_order, terms=rng.randint(1, 2), fractions=False))
            else:
                row.append(DiffOp.zero(tlf))
        rows.append(row)
    return ContinuousDO(M, N, DiffOpMatrix(tlf, rows))
