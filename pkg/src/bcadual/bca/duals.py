"""Duals Dual_sigma M = Hom_{K;sigma}(M, omega(K)) of finite-length modules.

A dual element is stored by its values phi(x_i) = c_i w0 on the filtered
basis, w0 the standard top form of K.  Two coefficient fields sigma, sigma'
congruent mod m are compared through the operator matrix D_ij with
sigma'(lam) x_i = sum_j sigma(D_ij(lam)) x_j.
"""
from __future__ import annotations

from ..errors import DescriptorMismatchError, FieldMismatchError
from ..forms import Form
from ..linalg import c_inverse, c_mul, c_transpose
from ..series import Laurent
from ..weyl import DiffOp, DiffOpMatrix, do_mul, do_order, right_action, right_action_coeff, transpose
from .algebra import CoeffField
from .modules import FinLenModule


def _live(x) -> bool:
    return bool(x.terms) or x.window is not None


def _check_sigma(sigma: CoeffField, M: FinLenModule):
    if sigma.bca != M.bca:
        raise FieldMismatchError(f"coefficient field of {sigma.bca} used on a module over {M.bca}")


def _derive_multi(a: Laurent, beta, names) -> Laurent:
    for name, k in zip(names, beta):
        for _ in range(k):
            a = a.derive(name)
    return a


# -- sigma-coordinates

def sigma_coords(sigma: CoeffField, M: FinLenModule, w) -> list:
    """Lam with w = sum_i sigma(Lam_i) x_i, for canonical coordinates w.

    sigma(lam) x_i = sum_beta (E^beta/beta!) d^beta(lam) x_i, so w = Lam + T(Lam)
    with T strictly raising the filtration; Lam = sum_k (-T)^k w.
    """
    _check_sigma(sigma, M)
    taylor = sigma.module_taylor(M)
    total = list(w)
    if not taylor:
        return total
    names = M.tlf.all_vars
    term = list(w)
    for _ in range(M.max_ord()):
        nxt = [M.tlf.zero() for _ in range(M.length)]
        for beta, mat in taylor:
            cache = {}
            for (r, c), e in mat.items():
                if not _live(term[c]):
                    continue
                d = cache.get(c)
                if d is None:
                    d = cache[c] = _derive_multi(term[c], beta, names)
                if _live(d):
                    nxt[r] = nxt[r] + e * d
        term = [-x for x in nxt]
        if not any(_live(x) for x in term):
            break
        total = [a + b for a, b in zip(total, term)]
    return total


def sigma_coords_ops(sigma: CoeffField, M: FinLenModule, w) -> list:
    """Operator version: w_n are operators in lam, result Lam_n likewise."""
    _check_sigma(sigma, M)
    taylor = sigma.module_taylor(M)
    total = list(w)
    if not taylor:
        return total
    tlf = M.tlf
    term = list(w)
    for _ in range(M.max_ord()):
        nxt = [DiffOp.zero(tlf) for _ in range(M.length)]
        for beta, mat in taylor:
            left = DiffOp.monomial(tlf, beta)
            cache = {}
            for (r, c), e in mat.items():
                if not term[c].terms:
                    continue
                d = cache.get(c)
                if d is None:
                    d = cache[c] = do_mul(left, term[c])
                nxt[r] = nxt[r] + d.scale(e)
        term = [-x for x in nxt]
        if not any(x.terms for x in term):
            break
        total = [a + b for a, b in zip(total, term)]
    return total


def sigma_action_ops(sigma: CoeffField, M: FinLenModule, i: int) -> list:
    """Canonical coordinates of sigma(lam) x_i as operators in lam."""
    _check_sigma(sigma, M)
    tlf = M.tlf
    out = [DiffOp.zero(tlf) for _ in range(M.length)]
    out[i] = DiffOp.identity(tlf)
    for beta, mat in sigma.module_taylor(M):
        for (r, c), e in mat.items():
            if c == i:
                out[r] = out[r] + DiffOp.monomial(tlf, beta, e)
    return out


def sigma_times(sigma: CoeffField, M: FinLenModule, lam: Laurent, v) -> list:
    """sigma(lam) . v in canonical coordinates."""
    return M.act(sigma.apply(lam), v)


def from_sigma_coords(sigma: CoeffField, M: FinLenModule, lam) -> list:
    """Canonical coordinates of sum_i sigma(lam_i) x_i."""
    out = M.zero_vector()
    for i, a in enumerate(lam):
        if _live(a):
            out = [x + y for x, y in zip(out, sigma_times(sigma, M, a, M.unit(i)))]
    return out


def dij_matrix(sigma: CoeffField, sigma2: CoeffField, M: FinLenModule) -> DiffOpMatrix:
    """D with sigma2(lam) x_i = sum_j sigma(D_ij(lam)) x_j; row i, column j."""
    if not sigma.congruent(sigma2):
        raise FieldMismatchError("coefficient fields are not congruent mod m")
    rows = []
    for i in range(M.length):
        rows.append(sigma_coords_ops(sigma, M, sigma_action_ops(sigma2, M, i)))
    return DiffOpMatrix(M.tlf, rows)


# -- dual elements

class DualElement:
    __slots__ = ("module", "sigma", "coeffs")

    def __init__(self, module: FinLenModule, sigma: CoeffField, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) != module.length:
            raise ValueError("one value per basis element")
        _check_sigma(sigma, module)
        for c in coeffs:
            if c.tlf != module.tlf:
                raise DescriptorMismatchError(f"{c.tlf} vs {module.tlf}")
        self.module = module
        self.sigma = sigma
        self.coeffs = coeffs

    @classmethod
    def from_values(cls, module: FinLenModule, sigma: CoeffField, values) -> "DualElement":
        return cls(module, sigma, [v.top_coeff() for v in values])

    @classmethod
    def basis_element(cls, module: FinLenModule, sigma: CoeffField, j: int) -> "DualElement":
        return cls(module, sigma, module.unit(j))

    @property
    def values(self) -> list:
        return [Form.top(c) for c in self.coeffs]

    def _same(self, other: "DualElement"):
        if other.module is not self.module or other.sigma != self.sigma:
            raise FieldMismatchError("dual elements live in different duals")

    def __add__(self, other: "DualElement") -> "DualElement":
        self._same(other)
        return DualElement(self.module, self.sigma, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "DualElement") -> "DualElement":
        self._same(other)
        return DualElement(self.module, self.sigma, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, lam) -> "DualElement":
        """lam . phi for lam in K (values scale, sigma-linearity is preserved)."""
        return DualElement(self.module, self.sigma, [c * lam for c in self.coeffs])

    def acted(self, a) -> "DualElement":
        """(a phi)(x) = phi(a x) for a in A."""
        M = self.module
        coeffs = []
        for i in range(M.length):
            coeffs.append(dual_eval_coeff(self, M.act(a, M.unit(i))))
        return DualElement(M, self.sigma, coeffs)

    def __eq__(self, other):
        if not isinstance(other, DualElement):
            return NotImplemented
        return self.module is other.module and self.sigma == other.sigma and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def agrees(self, other: "DualElement") -> bool:
        return all(a.agrees(b) for a, b in zip(self.coeffs, other.coeffs))

    def is_zero(self) -> bool:
        return all(not c.terms for c in self.coeffs)

    def __str__(self):
        return "; ".join(f"{lbl} -> {v}" for lbl, v in zip(self.module.labels, self.values))

    def __repr__(self):
        return f"DualElement({self})"

    def to_json(self):
        return {"values": [v.to_json() for v in self.values], "sigma": str(self.sigma)}


def dual_eval_coeff(phi: DualElement, x) -> Laurent:
    lam = sigma_coords(phi.sigma, phi.module, x)
    out = phi.module.tlf.zero()
    for a, c in zip(lam, phi.coeffs):
        if _live(a) and _live(c):
            out = out + a * c
    return out


def dual_eval(phi: DualElement, x) -> Form:
    """phi(x) for x in canonical coordinates."""
    return Form.top(dual_eval_coeff(phi, x))


def residue_pairing(x, phi: DualElement) -> Form:
    """<x, phi> in omega(K)."""
    return dual_eval(phi, x)


# -- Psi

def psi(sigma: CoeffField, sigma2: CoeffField, M: FinLenModule, phi: DualElement,
        via_forms: bool = False) -> DualElement:
    """Psi_{sigma,sigma2}(phi)(x_i) = sum_j phi(x_j) * D_ij."""
    if phi.sigma != sigma or phi.module is not M:
        raise FieldMismatchError("phi is not a dual element under the first coefficient field")
    if sigma == sigma2:
        return DualElement(M, sigma2, phi.coeffs)
    D = dij_matrix(sigma, sigma2, M)
    return DualElement(M, sigma2, _right_apply(D, phi.coeffs, via_forms))


def _right_apply(D: DiffOpMatrix, coeffs, via_forms: bool) -> list:
    """out_i = sum_j (c_j w0) * D_ij, as coefficients."""
    tlf = D.tlf
    out = []
    m, n = D.shape
    for i in range(m):
        acc = tlf.zero()
        for j in range(n):
            P = D.rows[i][j]
            if not P.terms or not _live(coeffs[j]):
                continue
            if via_forms:
                acc = acc + right_action(Form.top(coeffs[j]), P).top_coeff()
            else:
                acc = acc + right_action_coeff(coeffs[j], P)
        out.append(acc)
    return out


# -- continuous differential operators between modules

class ContinuousDO:
    """D: M -> N by its canonical matrix: D(sigma_0(lam) x_i) = sum_j sigma_0(C[j][i](lam)) y_j."""

    def __init__(self, source: FinLenModule, target: FinLenModule, matrix: DiffOpMatrix):
        if source.bca != target.bca:
            raise FieldMismatchError("source and target live over different algebras")
        if matrix.shape != (target.length, source.length):
            raise ValueError("operator matrix has the wrong shape")
        self.source = source
        self.target = target
        self.matrix = matrix

    @classmethod
    def identity(cls, M: FinLenModule) -> "ContinuousDO":
        return cls(M, M, DiffOpMatrix.identity(M.tlf, M.length))

    @classmethod
    def multiplication(cls, M: FinLenModule, a) -> "ContinuousDO":
        return cls(M, M, DiffOpMatrix.from_scalars(M.tlf, M.action_matrix(a)))

    @classmethod
    def constant(cls, source: FinLenModule, target: FinLenModule, mat) -> "ContinuousDO":
        tlf = source.tlf
        return cls(source, target, DiffOpMatrix.from_scalars(tlf, [[tlf.const(x) for x in r] for r in mat]))

    def apply(self, v) -> list:
        return self.matrix.apply(v)

    def compose(self, other: "ContinuousDO") -> "ContinuousDO":
        """self . other."""
        if other.target is not self.source:
            raise ValueError("modules do not match for composition")
        return ContinuousDO(other.source, self.target, self.matrix.compose(other.matrix))

    def sigma_matrix(self, sigma: CoeffField) -> DiffOpMatrix:
        """D^sigma with D(sigma(lam) x_i) = sum_j sigma(D^sigma_ij(lam)) y_j; rows over the source."""
        rows = []
        M, N = self.source, self.target
        for i in range(M.length):
            w = sigma_action_ops(sigma, M, i)
            image = []
            for j in range(N.length):
                acc = DiffOp.zero(M.tlf)
                for k in range(M.length):
                    A, B = self.matrix.rows[j][k], w[k]
                    if A.terms and B.terms:
                        acc = acc + do_mul(A, B)
                image.append(acc)
            rows.append(sigma_coords_ops(sigma, N, image))
        return DiffOpMatrix(M.tlf, rows)

    def __eq__(self, other):
        if not isinstance(other, ContinuousDO):
            return NotImplemented
        return self.source is other.source and self.target is other.target and self.matrix == other.matrix

    def __hash__(self):
        return id(self.source) ^ id(self.target)

    def __str__(self):
        return str(self.matrix)


class DualMap:
    """Dual_sigma(D): Dual_sigma N -> Dual_sigma M, acting on value coefficients."""

    def __init__(self, D: ContinuousDO, sigma: CoeffField, via_forms: bool = False):
        self.do = D
        self.sigma = sigma
        self.sigma_matrix = D.sigma_matrix(sigma)
        self.via_forms = via_forms

    def __call__(self, phi: DualElement) -> DualElement:
        if phi.module is not self.do.target or phi.sigma != self.sigma:
            raise FieldMismatchError("dual element does not live on the target of the operator")
        coeffs = _right_apply(self.sigma_matrix, phi.coeffs, self.via_forms)
        return DualElement(self.do.source, self.sigma, coeffs)

    def value_matrix(self) -> DiffOpMatrix:
        """Operator matrix on value coefficients: G[i][j] = transpose(D^sigma_ij)."""
        S = self.sigma_matrix
        return DiffOpMatrix(S.tlf, [[transpose(P) for P in row] for row in S.rows])


def dual_of_do(sigma: CoeffField, D: ContinuousDO, via_forms: bool = False) -> DualMap:
    return DualMap(D, sigma, via_forms)


# -- dual modules under the canonical coefficient field

class DualModule:
    """Dual_{sigma_0} M as a finite-length module with its own filtered basis.

    Value vectors of the basis are the columns of P.
    """

    def __init__(self, base: FinLenModule):
        A = base.bca
        actions = [c_transpose(N) for N in base.actions]
        labels = [f"d{i}" for i in range(base.length)]
        self.base = base
        self.module, self.P = FinLenModule.from_actions(A, actions, labels, n=base.length)
        self.Pinv = c_inverse(self.P, A.cone, A.czero)
        self.sigma0 = CoeffField.canonical(A)

    @property
    def length(self) -> int:
        return self.module.length

    def element(self, coords) -> DualElement:
        """Dual element whose coordinates in the dual filtered basis are coords."""
        tlf = self.base.tlf
        n = self.base.length
        vals = []
        for i in range(n):
            acc = tlf.zero()
            for a, c in enumerate(coords):
                if self.P[i][a] and _live(c):
                    acc = acc + c * self.P[i][a]
            vals.append(acc)
        return DualElement(self.base, self.sigma0, vals)

    def coords(self, phi: DualElement) -> list:
        if phi.module is not self.base:
            raise FieldMismatchError("dual element of a different module")
        if not phi.sigma.is_canonical:
            phi = psi(phi.sigma, self.sigma0, self.base, phi)
        tlf = self.base.tlf
        out = []
        for a in range(self.length):
            acc = tlf.zero()
            for i, c in enumerate(phi.coeffs):
                if self.Pinv[a][i] and _live(c):
                    acc = acc + c * self.Pinv[a][i]
            out.append(acc)
        return out


_DUALS = {}


def dual_module(M: FinLenModule) -> DualModule:
    hit = _DUALS.get(id(M))
    if hit is not None and hit.base is M:
        return hit
    D = DualModule(M)
    _DUALS[id(M)] = D
    return D


def k_dualizing(A) -> DualModule:
    """K(A) = Dual_{sigma_0} A with its filtered dual basis."""
    return dual_module(FinLenModule.from_bca(A))


def evaluation_matrix(M: FinLenModule) -> list:
    """Constant matrix of M -> Dual Dual M, x -> (phi -> phi(x)), in filtered coordinates."""
    DM = dual_module(M)
    DDM = dual_module(DM.module)
    A = M.bca
    return c_mul(DDM.Pinv, c_transpose(DM.P), A.czero)


def dual_do(D: ContinuousDO) -> ContinuousDO:
    """Dual_{sigma_0}(D) as a continuous operator Dual N -> Dual M in dual filtered coordinates."""
    A = D.source.bca
    DM, DN = dual_module(D.source), dual_module(D.target)
    G = DualMap(D, CoeffField.canonical(A)).value_matrix()
    tlf = D.source.tlf
    left = DiffOpMatrix.from_scalars(tlf, [[tlf.const(x) for x in r] for r in DM.Pinv])
    right = DiffOpMatrix.from_scalars(tlf, [[tlf.const(x) for x in r] for r in DN.P])
    return ContinuousDO(DN.module, DM.module, left.compose(G).compose(right))


# -- orders over A

def _commutators(D: ContinuousDO, start: int = 0) -> list:
    """[(k, [g_k, D])] over the generators of A with index >= start: nilpotents, then K's variables."""
    M, N = D.source, D.target
    tlf = M.tlf
    out = []
    C = D.matrix
    r = len(M.bca.nilp_vars)
    for j in range(start, r):
        NM = DiffOpMatrix.from_scalars(tlf, [[tlf.const(x) for x in row] for row in M.actions[j]])
        NN = DiffOpMatrix.from_scalars(tlf, [[tlf.const(x) for x in row] for row in N.actions[j]])
        out.append((j, ContinuousDO(M, N, C.compose(NM) - NN.compose(C))))
    for k, v in enumerate(tlf.all_vars, start=r):
        if k < start:
            continue
        x = DiffOp.scalar(tlf.var(v))
        rows = [[do_mul(P, x) - do_mul(x, P) for P in row] for row in C.rows]
        out.append((k, ContinuousDO(M, N, DiffOpMatrix(tlf, rows))))
    return out


def bca_order(D: ContinuousDO, limit: int = 16) -> int:
    """Smallest n with all (n+1)-fold commutators with generators of A zero; -1 for D = 0.

    Generators commute, so iterated commutators depend only on the multiset
    of generators; non-decreasing index sequences cover them all.
    """
    level = [(0, D)]
    for n in range(-1, limit):
        if all(X.matrix.is_zero() for _, X in level):
            return n
        nxt = []
        for start, X in level:
            if X.matrix.is_zero():
                continue
            nxt.extend((k, Y) for k, Y in _commutators(X, start) if not Y.matrix.is_zero())
        level = nxt
    raise ValueError("operator order exceeds the search limit")


def matrix_order_bound(S: DiffOpMatrix) -> int:
    return max((do_order(P) for row in S.rows for P in row), default=-1)
