"""Finite-length modules with m-filtered bases.

Module structure is carried by constant matrices (prime-field entries) for
the nilpotent generators, column convention: t_j x_b = sum_a N_j[a][b] x_a.
Coordinates of module elements are K-vectors relative to the canonical
coefficient field, so sigma_0(lam) x_i has coordinate lam at position i.
"""
from __future__ import annotations

from ..series import monomial_text
from ..linalg import Span, c_identity, c_inverse, c_mul, c_zeros
from .algebra import ArtinianBca, minimal_generators, monomial_key, standard_monomials


_REGULAR = {}


class FinLenModule:
    def __init__(self, bca: ArtinianBca, actions, ords, labels=None):
        n = len(ords)
        if len(actions) != len(bca.nilp_vars):
            raise ValueError("one action matrix per nilpotent variable")
        for N in actions:
            if len(N) != n or any(len(r) != n for r in N):
                raise ValueError("action matrix has wrong shape")
        ords = list(ords)
        if ords != sorted(ords):
            raise ValueError("basis must be sorted by m-adic order")
        # t_j raises the filtration level
        for N in actions:
            for a in range(n):
                for b in range(n):
                    if N[a][b] and ords[a] < ords[b] + 1:
                        raise ValueError("action does not respect the m-adic filtration")
        self.bca = bca
        self.actions = [[list(r) for r in N] for N in actions]
        self.ords = ords
        self.labels = list(labels) if labels is not None else [f"x{i}" for i in range(n)]
        self._mono_cache = {}

    @property
    def length(self) -> int:
        return len(self.ords)

    @property
    def tlf(self):
        return self.bca.coeff_tlf

    def __str__(self):
        return f"module of length {self.length} over {self.bca}"

    def __repr__(self):
        return f"FinLenModule({self.bca}, basis={self.labels})"

    # -- constructors

    @classmethod
    def cyclic_sum(cls, bca: ArtinianBca, ideals) -> "FinLenModule":
        """Direct sum of A/J_s for monomial ideals J_s (I is added to each)."""
        r = len(bca.nilp_vars)
        elems = []
        for s, J in enumerate(ideals):
            gens = minimal_generators(list(J) + list(bca.ideal))
            mons = standard_monomials(gens, r)
            elems.extend((s, m) for m in mons)
        elems.sort(key=lambda sm: monomial_key(sm[1]) + (sm[0],))
        index = {sm: i for i, sm in enumerate(elems)}
        zero, one = bca.czero, bca.cone
        n = len(elems)
        actions = []
        for j in range(r):
            N = c_zeros(n, n, zero)
            for b, (s, m) in enumerate(elems):
                up = tuple(k + (i == j) for i, k in enumerate(m))
                a = index.get((s, up))
                if a is not None:
                    N[a][b] = one
            actions.append(N)
        labels = []
        for s, m in elems:
            mono = monomial_text(bca.nilp_vars, m) or "1"
            labels.append(mono if len(ideals) == 1 else f"{mono}@{s}")
        return cls(bca, actions, [sum(m) for _, m in elems], labels)

    @classmethod
    def from_bca(cls, bca: ArtinianBca) -> "FinLenModule":
        """A as a module over itself; basis equals the algebra's standard monomials.

        Cached so dual elements of A built at different times share a module.
        """
        hit = _REGULAR.get(bca)
        if hit is None:
            hit = _REGULAR[bca] = cls.cyclic_sum(bca, [[]])
        return hit

    @classmethod
    def from_actions(cls, bca: ArtinianBca, actions, labels=None, n=None):
        """Module on F^n with commuting nilpotent constant actions.

        Returns (module, P) where the columns of P are the chosen filtered
        basis written in the original coordinates.
        """
        if n is None:
            n = len(actions[0]) if actions else len(labels or ())
        zero, one = bca.czero, bca.cone
        levels = []
        current = [[one if i == j else zero for i in range(n)] for j in range(n)]
        while current:
            nxt = Span(n, zero)
            for N in actions:
                for v in current:
                    w = [sum((N[a][b] * v[b] for b in range(n) if N[a][b] and v[b]), zero) for a in range(n)]
                    nxt.add(w)
            levels.append((current, nxt))
            current = [list(r) for r in nxt.rows]
            if len(levels) > n + 1:
                raise ValueError("actions are not nilpotent")
        chosen = []
        ords = []
        for level, (vecs, below) in enumerate(levels):
            span = Span(n, zero)
            for row in below.rows:
                span.add(row)
            for v in vecs:
                if span.add(v):
                    chosen.append(v)
                    ords.append(level)
        if len(chosen) != n:
            raise ValueError("filtration did not produce a basis")
        P = [[chosen[j][i] for j in range(n)] for i in range(n)]
        Pinv = c_inverse(P, one, zero)
        new_actions = [c_mul(Pinv, c_mul(N, P, zero), zero) for N in actions]
        return cls(bca, new_actions, ords, labels), P

    def rebased(self, Q) -> "FinLenModule":
        """Same module with basis x'_i = sum_k Q[k][i] x_k (Q must respect the filtration)."""
        zero, one = self.bca.czero, self.bca.cone
        n = self.length
        for k in range(n):
            for i in range(n):
                if Q[k][i] and self.ords[k] < self.ords[i]:
                    raise ValueError("basis change lowers the m-adic order")
        Qinv = c_inverse(Q, one, zero)
        actions = [c_mul(Qinv, c_mul(N, Q, zero), zero) for N in self.actions]
        return FinLenModule(self.bca, actions, self.ords, [f"{l}'" for l in self.labels])

    # -- actions

    def monomial_action(self, m):
        m = tuple(m)
        hit = self._mono_cache.get(m)
        if hit is not None:
            return hit
        zero, one = self.bca.czero, self.bca.cone
        out = c_identity(self.length, one, zero)
        for N, k in zip(self.actions, m):
            for _ in range(k):
                out = c_mul(N, out, zero)
        self._mono_cache[m] = out
        return out

    def action_sparse(self, a) -> dict:
        """{(row, col): Laurent} for multiplication by the algebra element a."""
        out = {}
        for m, coeff in zip(self.bca.basis, a):
            if not coeff.terms and coeff.window is None:
                continue
            N = self.monomial_action(m)
            for r, row in enumerate(N):
                for c, x in enumerate(row):
                    if x:
                        v = coeff * x
                        out[(r, c)] = out[(r, c)] + v if (r, c) in out else v
        return {k: v for k, v in out.items() if v.terms or v.window is not None}

    def action_matrix(self, a) -> list:
        """Dense K-matrix of multiplication by a."""
        zero = self.tlf.zero
        n = self.length
        mat = [[zero() for _ in range(n)] for _ in range(n)]
        for (r, c), v in self.action_sparse(a).items():
            mat[r][c] = v
        return mat

    def act(self, a, v) -> list:
        """a . v for a vector of canonical coordinates."""
        out = [self.tlf.zero() for _ in range(self.length)]
        for (r, c), x in self.action_sparse(a).items():
            if v[c].terms or v[c].window is not None:
                out[r] = out[r] + x * v[c]
        return out

    def zero_vector(self) -> list:
        return [self.tlf.zero() for _ in range(self.length)]

    def unit(self, i: int, lam=None) -> list:
        v = self.zero_vector()
        v[i] = self.tlf.one() if lam is None else lam
        return v

    def max_ord(self) -> int:
        return max(self.ords, default=0)


def quotient_module(bca: ArtinianBca, dim: int, actions, relations):
    """F^dim / span(relations) with induced actions.

    Returns (module, lift, project): ``lift`` (dim x length) maps filtered
    coordinates to F^dim, ``project`` maps a vector of F^dim to filtered
    coordinates of its class.
    """
    zero = bca.czero
    rel = Span(dim, zero)
    for v in relations:
        rel.add(v)
    pivots = set(rel.pivots)
    comp = [i for i in range(dim) if i not in pivots]
    q = len(comp)

    def reduce(v):
        w = rel.reduce(v)
        return [w[i] for i in comp]

    induced = []
    for N in actions:
        mat = c_zeros(q, q, zero)
        for a, i in enumerate(comp):
            col = reduce([N[r][i] for r in range(dim)])
            for r in range(q):
                mat[r][a] = col[r]
        induced.append(mat)
    module, P = FinLenModule.from_actions(bca, induced, n=q)
    Pinv = c_inverse(P, bca.cone, zero)
    lift = c_zeros(dim, q, zero)
    for a, i in enumerate(comp):
        for b in range(q):
            lift[i][b] = P[a][b]

    def project(v):
        w = reduce(v)
        return [sum((Pinv[r][k] * w[k] for k in range(q) if Pinv[r][k] and w[k]), zero) for r in range(q)]

    return module, lift, project


def k_module(bca: ArtinianBca) -> FinLenModule:
    return FinLenModule.from_bca(bca)
