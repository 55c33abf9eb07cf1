"""Intensification along k(s) -> k((s)): function variables of the coefficient
field become new innermost Laurent variables, expanded at the origin.

Everything here is expansion: elements, forms, operators, algebras,
coefficient fields and dual elements are pushed to the intensified data, and
the reports compare the two routes around each commuting square.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .bca.algebra import ArtinianBca, CoeffField
from .bca.duals import DualElement, psi
from .bca.modules import FinLenModule
from .bca.traces import BcaMorphism, _prime_value, trace_map
from .errors import UnknownVariableError, UnsupportedShapeError
from .forms import Form, _sort_sign
from .series import (
    INF,
    KummerStep,
    Laurent,
    LaurentStep,
    TlfDescriptor,
    _remaining_field,
    expand_rational,
)
from .weyl import DiffOp, DiffOpMatrix

DEFAULT_WINDOW = 12


class Intensification:
    """K -> K-hat promoting ``promote`` (one variable per step; a tuple for composites)."""

    def __init__(self, source: TlfDescriptor, promote, window: int = DEFAULT_WINDOW):
        if isinstance(promote, str):
            promote = (promote,)
        promote = tuple(promote)
        F = source.coeff_field
        if F.kind != "rational_functions":
            raise UnsupportedShapeError("intensification promotes rational-function variables")
        if not promote or len(set(promote)) != len(promote):
            raise ValueError("promote at least one distinct variable")
        for v in promote:
            if v not in F.vars:
                raise UnknownVariableError(f"{v!r} is not a function variable of {source}")
        self.source = source
        self.promote = promote
        self.window = window
        self.rest_field = _remaining_field(F, promote)
        self.target = TlfDescriptor(self.rest_field, source.vars + promote)
        self._perm = [self.target.index(v) for v in source.all_vars]

    @property
    def is_step(self) -> bool:
        return len(self.promote) == 1

    def then(self, other: "Intensification") -> "Intensification":
        """The composite other . self, as one simultaneous expansion."""
        if other.source != self.target:
            raise ValueError("intensifications are not composable")
        return Intensification(self.source, self.promote + other.promote, min(self.window, other.window))

    def __str__(self):
        return f"{self.source} -> {self.target} (window {self.window})"

    # -- elements

    def expand(self, x: Laurent) -> Laurent:
        if x.tlf != self.source:
            raise ValueError(f"{x.tlf} is not the source {self.source}")
        T = self.target
        k = len(self.promote)
        F = self.source.coeff_field
        total = Laurent(T, {}, trusted=True)
        for e, c in x.terms.items():
            piece = expand_rational(c, F, self.promote, self.window)
            total = total + _embed(piece, T, e)
        if x.window is not None:
            pad = tuple(x.window) + ((INF, INF),) * k
            total = total + Laurent(T, {}, pad, trusted=True)
        return total

    def expand_scalar(self, c) -> Laurent:
        return self.expand(self.source.const(c))

    def expand_form(self, alpha: Form) -> Form:
        comps = {}
        for key, a in alpha.components.items():
            sign, new = _sort_sign([self._perm[i] for i in key])
            b = self.expand(a)
            if sign < 0:
                b = -b
            comps[new] = comps[new] + b if new in comps else b
        return Form(self.target, alpha.degree, comps)

    def expand_op(self, D: DiffOp) -> DiffOp:
        n = len(self.target.all_vars)
        terms = {}
        for beta, a in D.terms.items():
            nb = [0] * n
            for i, k in enumerate(beta):
                nb[self._perm[i]] = k
            terms[tuple(nb)] = self.expand(a)
        return DiffOp(self.target, terms)

    def expand_op_matrix(self, M: DiffOpMatrix) -> DiffOpMatrix:
        return DiffOpMatrix(self.target, [[self.expand_op(P) for P in row] for row in M.rows])

    # -- algebras, modules, coefficient fields, duals

    def expand_bca(self, A: ArtinianBca) -> ArtinianBca:
        if A.coeff_tlf != self.source:
            raise ValueError("algebra is not over the source of the intensification")
        return ArtinianBca(self.target, A.nilp_vars, A.ideal)

    def expand_element(self, x) -> list:
        return [self.expand(a) for a in x]

    def expand_sigma(self, sigma: CoeffField) -> CoeffField:
        Ahat = self.expand_bca(sigma.bca)
        eps = {v: self.expand_element(x) for v, x in sigma.eps.items()}
        return CoeffField(Ahat, eps)

    def expand_module(self, M: FinLenModule) -> FinLenModule:
        Ahat = self.expand_bca(M.bca)
        if M is FinLenModule.from_bca(M.bca):
            return FinLenModule.from_bca(Ahat)
        key = (id(M), self.target)
        hit = _MODULES.get(key)
        if hit is not None and hit[0] is M:
            return hit[1]
        out = FinLenModule(Ahat, M.actions, M.ords, M.labels)
        _MODULES[key] = (M, out)
        return out

    def expand_step(self, step) -> tuple:
        """(step over the target, intensification of the step's target)."""
        if step.kind == "laurent_step":
            hat = LaurentStep(self.target, step.var)
        elif step.kind == "kummer_step":
            hat = KummerStep(self.target, step.var, step.new_var, step.e,
                             tuple(_constant_value(step.source.coeff_field, c) for c in step.g))
        else:
            raise UnsupportedShapeError("coefficient-field extensions are not base-changed")
        nxt = Intensification(step.target, self.promote, self.window)
        if nxt.target != hat.target:
            raise UnsupportedShapeError("base change of the step does not match")
        return hat, nxt

    def expand_morphism(self, f: BcaMorphism) -> tuple:
        """(f-hat: A-hat -> B-hat, intensification of B's coefficients)."""
        u = self
        steps = []
        for step in f.tower:
            hat, u = u.expand_step(step)
            steps.append(hat)
        Ahat = self.expand_bca(f.source)
        Bhat = u.expand_bca(f.target)
        images = {v: u.expand_element(y) for v, y in zip(f.source.nilp_vars, f.images)}
        return BcaMorphism(Ahat, Bhat, steps, images), u


_MODULES = {}


def _embed(piece: Laurent, T: TlfDescriptor, e) -> Laurent:
    """t^e * piece where piece lives over F'((promoted))."""
    terms = {tuple(e) + k: c for k, c in piece.terms.items()}
    window = None
    if piece.window is not None:
        window = tuple((k, INF) for k in e) + tuple(piece.window)
    return Laurent(T, terms, window, trusted=True)


def _constant_value(F, c):
    v = _prime_value(F, c)
    if v is None:
        raise UnsupportedShapeError("substitution unit has non-constant coefficients")
    return v


def intensify_tlf(K: TlfDescriptor, promote, window: int = DEFAULT_WINDOW) -> TlfDescriptor:
    return Intensification(K, promote, window).target


def intensify_bca(A: ArtinianBca, u: Intensification) -> ArtinianBca:
    return u.expand_bca(A)


def q_dual(u: Intensification, sigma: CoeffField, M: FinLenModule, phi: DualElement) -> DualElement:
    """phi-hat with phi-hat(1 (x) x_i) = expansion of phi(x_i)."""
    if phi.module is not M or phi.sigma != sigma:
        raise ValueError("phi does not live in Dual_sigma M")
    Mhat = u.expand_module(M)
    shat = u.expand_sigma(sigma)
    coeffs = [u.expand_form(Form.top(c)).top_coeff() for c in phi.coeffs]
    return DualElement(Mhat, shat, coeffs)


# -- reports

@dataclass
class SquareReport:
    name: str
    cases: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c["verdict"] == "pass" for c in self.cases)

    def add(self, index: int, lhs, rhs, agrees: bool, inputs=None):
        self.cases.append({
            "index": index,
            "verdict": "pass" if agrees else "fail",
            "lhs": str(lhs),
            "rhs": str(rhs),
            "inputs": inputs or {},
        })

    def to_json(self):
        return {"name": self.name, "ok": self.ok, "cases": self.cases}


def _duals_agree(a: DualElement, b: DualElement) -> bool:
    return len(a.coeffs) == len(b.coeffs) and all(x.agrees(y) for x, y in zip(a.coeffs, b.coeffs))


def random_dual(M: FinLenModule, sigma: CoeffField, rng: random.Random, make) -> DualElement:
    return DualElement(M, sigma, [make(rng) for _ in range(M.length)])


def check_square_psi(u: Intensification, sigma: CoeffField, sigma2: CoeffField, M: FinLenModule,
                     phis, inject: bool = False) -> SquareReport:
    """Psi-hat . q_sigma == q_sigma2 . Psi on each phi."""
    rep = SquareReport("psi-square")
    Mhat = u.expand_module(M)
    shat, shat2 = u.expand_sigma(sigma), u.expand_sigma(sigma2)
    for i, phi in enumerate(phis):
        lhs = psi(shat, shat2, Mhat, q_dual(u, sigma, M, phi))
        rhs = q_dual(u, sigma2, M, psi(sigma, sigma2, M, phi))
        if inject:
            rhs = rhs.scale(-1)
        rep.add(i, lhs, rhs, _duals_agree(lhs, rhs), {"phi": str(phi)})
    return rep


def check_square_trace(f: BcaMorphism, u: Intensification, phis, sigma: CoeffField | None = None,
                       inject: bool = False) -> SquareReport:
    """q_u . Tr_{B/A} == Tr_{B-hat/A-hat} . q_v on each phi in K(B)."""
    rep = SquareReport("trace-square")
    A, B = f.source, f.target
    sigma = sigma or CoeffField.canonical(A)
    fhat, v = u.expand_morphism(f)
    shat = u.expand_sigma(sigma)
    MA, MB = FinLenModule.from_bca(A), FinLenModule.from_bca(B)
    s0A, s0B = CoeffField.canonical(A), CoeffField.canonical(B)
    for i, phi in enumerate(phis):
        lhs = q_dual(u, s0A, MA, trace_map(f, sigma, phi))
        rhs = trace_map(fhat, shat, q_dual(v, s0B, MB, phi))
        if inject:
            rhs = rhs.scale(-1)
        rep.add(i, lhs, rhs, _duals_agree(lhs, rhs), {"phi": str(phi)})
    return rep


def check_q_composite(u: Intensification, w: Intensification, sigma: CoeffField, M: FinLenModule,
                      phis) -> SquareReport:
    """q_{w.u} == q_w . q_u."""
    rep = SquareReport("q-composite")
    uw = u.then(w)
    Mhat = u.expand_module(M)
    shat = u.expand_sigma(sigma)
    for i, phi in enumerate(phis):
        lhs = q_dual(uw, sigma, M, phi)
        rhs = q_dual(w, shat, Mhat, q_dual(u, sigma, M, phi))
        rep.add(i, lhs, rhs, _duals_agree(lhs, rhs), {"phi": str(phi)})
    return rep


def check_associativity(A: ArtinianBca, u: Intensification, w: Intensification,
                        sigma: CoeffField | None = None, quotient=None) -> SquareReport:
    """Iterated base change along u then w against the composite, and
    quotient-then-promote against promote-then-quotient."""
    rep = SquareReport("associativity")
    uw = u.then(w)
    step = w.expand_bca(u.expand_bca(A))
    once = uw.expand_bca(A)
    rep.add(0, step, once, step == once and step.basis == once.basis, {"A": str(A)})
    if sigma is not None:
        s_step = w.expand_sigma(u.expand_sigma(sigma))
        s_once = uw.expand_sigma(sigma)
        same = all(s_step.bca.agrees(s_step.eps[v], s_once.eps[v]) for v in s_once.eps)
        rep.add(1, s_step, s_once, same, {"sigma": str(sigma)})
    if quotient is not None:
        gens = list(A.ideal) + [tuple(g) for g in quotient]
        q_then_p = u.expand_bca(ArtinianBca(A.coeff_tlf, A.nilp_vars, gens))
        p_then_q = ArtinianBca(u.target, A.nilp_vars, list(u.expand_bca(A).ideal) + [tuple(g) for g in quotient])
        rep.add(2, q_then_p, p_then_q, q_then_p == p_then_q, {"quotient": str(quotient)})
    return rep
