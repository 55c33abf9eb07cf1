"""Hypothesis strategies for series, forms and operators."""
from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from bcadual import gen
from bcadual.scalars import rational_functions, rationals
from bcadual.series import Laurent, TlfDescriptor
from bcadual.weyl import DiffOp

Q_T = gen.desc_laurent(1)
Q_T1T2 = gen.desc_laurent(2)
QS_T = gen.desc_with_function(1)
Q_S = TlfDescriptor(rational_functions(rationals(), ("s",)), ())

DESCRIPTORS = [Q_T, Q_T1T2, QS_T, Q_S]

small_fractions = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def coefficients(draw, F):
    if F.kind == "rational_functions":
        s = F.gen(F.vars[0])
        num = sum((F.coerce(draw(small_fractions)) * s ** k for k in range(draw(st.integers(0, 2)) + 1)), F.zero)
        if draw(st.booleans()):
            num = num / (F.one + F.coerce(draw(st.integers(1, 3))) * s)
        return num if num else F.one
    return F.coerce(draw(small_fractions))


@st.composite
def laurents(draw, tlf, max_terms=5, lo=-3, hi=3):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        e = tuple(draw(st.integers(lo, hi)) for _ in range(tlf.dim))
        terms[e] = draw(coefficients(tlf.coeff_field))
    return Laurent(tlf, terms)


@st.composite
def nonzero_laurents(draw, tlf, **kw):
    x = draw(laurents(tlf, **kw))
    return x if x.terms else tlf.one()


@st.composite
def ops(draw, tlf, max_order=3, max_terms=3):
    n = len(tlf.all_vars)
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        beta = [0] * n
        for _ in range(draw(st.integers(0, max_order))):
            beta[draw(st.integers(0, n - 1))] += 1
        terms[tuple(beta)] = draw(nonzero_laurents(tlf, max_terms=2, lo=-2, hi=2))
    return DiffOp(tlf, terms)


descriptors = st.sampled_from(DESCRIPTORS)
seeds = st.integers(0, 10 ** 6)
