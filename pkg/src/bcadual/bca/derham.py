"""The separated de Rham complex of an Artinian BCA as finite-length modules.

Omega^1 is generated by dv (v a coordinate of K) and dt_j, modulo the
differentials of the ideal generators; Omega^q is its q-th exterior power.
The differential is a continuous operator of order <= 1.
"""
from __future__ import annotations

from itertools import combinations

from ..errors import UnsupportedShapeError
from ..linalg import c_rank, c_zeros
from ..weyl import DiffOp, DiffOpMatrix
from .algebra import ArtinianBca
from .duals import ContinuousDO, dual_do
from .modules import quotient_module


def _wedge_sign(S, g):
    """(sign, sorted subset) for dg ^ e_S."""
    if g in S:
        return 0, None
    before = sum(1 for x in S if x < g)
    return (-1) ** before, tuple(sorted(S + (g,)))


class DeRhamComplex:
    def __init__(self, bca: ArtinianBca, q_max: int | None = None):
        K = bca.coeff_tlf
        if K.coeff_field.characteristic:
            raise UnsupportedShapeError("the de Rham complex is built in characteristic 0")
        self.bca = bca
        self.generators = [f"d{v}" for v in K.all_vars] + [f"d{t}" for t in bca.nilp_vars]
        nv = len(K.all_vars)
        r = len(bca.nilp_vars)
        ngen = nv + r
        top = ngen if q_max is None else min(q_max, ngen)
        self.subsets = [list(combinations(range(ngen), q)) for q in range(top + 1)]
        zero, one = bca.czero, bca.cone
        basis = bca.basis
        self.spaces = []
        for q, subsets in enumerate(self.subsets):
            cells = [(m, S) for S in subsets for m in basis]
            pos = {c: i for i, c in enumerate(cells)}
            dim = len(cells)
            actions = []
            for j in range(r):
                mat = c_zeros(dim, dim, zero)
                for (m, S), i in pos.items():
                    up = pos.get((tuple(k + (a == j) for a, k in enumerate(m)), S))
                    if up is not None:
                        mat[up][i] = one
                actions.append(mat)
            relations = []
            if q >= 1:
                for g in bca.ideal:
                    for S in combinations(range(ngen), q - 1):
                        for m in basis:
                            v = [zero] * dim
                            for j, gj in enumerate(g):
                                if not gj:
                                    continue
                                mono = tuple(a + b - (k == j) for k, (a, b) in enumerate(zip(m, g)))
                                sign, T = _wedge_sign(S, nv + j)
                                i = pos.get((mono, T)) if sign else None
                                if i is not None:
                                    v[i] = v[i] + sign * gj
                            relations.append(v)
            module, lift, project = quotient_module(bca, dim, actions, relations)
            module.labels = [f"w{q}.{i}" for i in range(module.length)]
            self.spaces.append((module, cells, pos, lift, project))
        self.modules = [sp[0] for sp in self.spaces]
        self.differentials = [self._differential(q) for q in range(len(self.spaces) - 1)]

    def _differential(self, q: int) -> ContinuousDO:
        K = self.bca.coeff_tlf
        nv = len(K.all_vars)
        src, cells, _, lift, _ = self.spaces[q]
        tgt, cells2, pos2, _, project = self.spaces[q + 1]
        zero = self.bca.czero
        # d(lam m e_S) = sum_v d_v(lam) m dv^e_S + lam sum_j m_j t^(m - e_j) dt_j^e_S
        full = [[DiffOp.zero(K) for _ in cells] for _ in cells2]
        for i, (m, S) in enumerate(cells):
            for v in range(nv):
                sign, T = _wedge_sign(S, v)
                if sign:
                    k = pos2[(m, T)]
                    full[k][i] = full[k][i] + DiffOp.partial(K, K.all_vars[v]).scale(K.const(sign))
            for j, mj in enumerate(m):
                if not mj:
                    continue
                mono = tuple(a - (k == j) for k, a in enumerate(m))
                sign, T = _wedge_sign(S, nv + j)
                if sign:
                    k = pos2[(mono, T)]
                    full[k][i] = full[k][i] + DiffOp.scalar(K.const(sign * mj))
        n2 = len(cells2)
        proj_rows = []
        for r in range(tgt.length):
            proj_rows.append([zero] * n2)
        for k in range(n2):
            e = [zero] * n2
            e[k] = self.bca.cone
            col = project(e)
            for r in range(tgt.length):
                proj_rows[r][k] = col[r]
        P = DiffOpMatrix.from_scalars(K, [[K.const(x) for x in row] for row in proj_rows])
        L = DiffOpMatrix.from_scalars(K, [[K.const(x) for x in row] for row in lift])
        C = P.compose(DiffOpMatrix(K, full)).compose(L)
        return ContinuousDO(src, tgt, C)

    def lengths(self) -> list:
        return [M.length for M in self.modules]

    def check_d_squared(self) -> bool:
        for a, b in zip(self.differentials, self.differentials[1:]):
            if not b.compose(a).matrix.is_zero():
                return False
        return True

    def dual_differentials(self) -> list:
        """Dual(d_q): Dual Omega^(q+1) -> Dual Omega^q."""
        return [dual_do(d) for d in self.differentials]

    def check_dual_squared(self) -> bool:
        duals = self.dual_differentials()
        for a, b in zip(duals, duals[1:]):
            # Dual(d_q) . Dual(d_(q+1))
            if not a.compose(b).matrix.is_zero():
                return False
        return True

    def cohomology_dims(self) -> list:
        """dim_k H^q, available when K is the prime field Q itself."""
        K = self.bca.coeff_tlf
        if K.all_vars or K.coeff_field.kind != "rationals":
            raise UnsupportedShapeError("cohomology dimensions are computed for K = Q")
        zero = self.bca.czero
        ranks = []
        for d in self.differentials:
            rows = [[_constant(P) for P in row] for row in d.matrix.rows]
            ranks.append(c_rank(rows, zero) if rows else 0)
        out = []
        for q, M in enumerate(self.modules):
            r_out = ranks[q] if q < len(ranks) else 0
            r_in = ranks[q - 1] if q >= 1 else 0
            out.append(M.length - r_out - r_in)
        return out


def _constant(P: DiffOp):
    if not P.terms:
        return 0
    (beta, a), = P.terms.items()
    if any(beta) or len(a.terms) > 1:
        raise UnsupportedShapeError("differential is not constant")
    return next(iter(a.terms.values())) if a.terms else 0


def omega_complex(A: ArtinianBca, q_max: int | None = None) -> DeRhamComplex:
    return DeRhamComplex(A, q_max)
