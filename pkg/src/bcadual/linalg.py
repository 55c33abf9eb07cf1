"""Small dense linear algebra.

Two flavours live here.  Constant matrices hold raw field values (Fraction,
Mod, ...) and use ordinary Gaussian elimination.  K-matrices hold Laurent
elements; their rank uses division-free elimination so windowed entries never
need inverting, and their inverse only divides by single-term pivots.
"""
from __future__ import annotations

from .errors import PrecisionError


def c_identity(n: int, one, zero):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def c_zeros(m: int, n: int, zero):
    return [[zero] * n for _ in range(m)]


def c_mul(a, b, zero):
    if not a:
        return []
    n = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [zero] * n
        for k, x in enumerate(row):
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        acc[j] = acc[j] + x * y
        out.append(acc)
    return out


def c_apply(a, v, zero):
    out = []
    for row in a:
        acc = zero
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def c_transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def c_rref(rows, zero):
    """Reduced row echelon form: (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def c_rank(rows, zero) -> int:
    return len(c_rref(rows, zero)[1])


def c_inverse(a, one, zero):
    n = len(a)
    aug = [list(a[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    red, piv = c_rref(aug, zero)
    if piv != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def c_nullspace(rows, ncols: int, one, zero):
    """Basis of {v : rows . v = 0}."""
    red, piv = c_rref(rows, zero) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, p in zip(red, piv):
            v[p] = -r[f]
        basis.append(v)
    return basis


def c_is_zero(a) -> bool:
    return all(not x for row in a for x in row)


class Span:
    """Incrementally built subspace of F^n with membership tests."""

    def __init__(self, n: int, zero):
        self.n = n
        self.zero = zero
        self.rows = []      # echelon rows, each normalized at its pivot
        self.pivots = []

    def reduce(self, v):
        v = list(v)
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                f = v[p]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def contains(self, v) -> bool:
        return not any(self.reduce(v))

    def add(self, v) -> bool:
        w = self.reduce(v)
        p = next((i for i, x in enumerate(w) if x), None)
        if p is None:
            return False
        inv = 1 / w[p]
        w = [x * inv for x in w]
        for i, row in enumerate(self.rows):
            if row[p]:
                f = row[p]
                self.rows[i] = [x - f * y for x, y in zip(row, w)]
        self.rows.append(w)
        self.pivots.append(p)
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)


# -- matrices over K (Laurent entries)

def _nonzero(x) -> bool:
    return bool(x.terms)


def k_mul(a, b, tlf):
    n = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [tlf.zero() for _ in range(n)]
        for k, x in enumerate(row):
            if x.terms:
                for j, y in enumerate(b[k]):
                    if y.terms:
                        acc[j] = acc[j] + x * y
        out.append(acc)
    return out


def k_apply(a, v, tlf):
    out = []
    for row in a:
        acc = tlf.zero()
        for x, y in zip(row, v):
            if x.terms and y.terms:
                acc = acc + x * y
        out.append(acc)
    return out


def k_rank(a) -> tuple:
    """(certified rank, exact) for a matrix of Laurent elements.

    Pivots are always certified nonzero.  ``exact`` is False when leftover
    entries are windowed zeros, in which case the rank is only a lower bound.
    """
    rows = [list(r) for r in a]
    if not rows:
        return 0, True
    rank = 0
    ncols = len(rows[0])
    used = [False] * len(rows)
    for c in range(ncols):
        p = next((i for i in range(len(rows)) if not used[i] and _nonzero(rows[i][c])), None)
        if p is None:
            continue
        used[p] = True
        rank += 1
        pv = rows[p][c]
        for i in range(len(rows)):
            if not used[i] and (rows[i][c].terms or rows[i][c].window is not None):
                f = rows[i][c]
                rows[i] = [pv * x - f * y for x, y in zip(rows[i], rows[p])]
    exact = all(x.window is None for i, r in enumerate(rows) if not used[i] for x in r)
    return rank, exact


def k_inverse(a, tlf):
    """Inverse by Gauss-Jordan, dividing only by single-term EXACT pivots."""
    n = len(a)
    rows = [list(a[i]) + [tlf.one() if i == j else tlf.zero() for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if len(rows[i][c].terms) == 1 and rows[i][c].window is None), None)
        if p is None:
            if any(rows[i][c].terms for i in range(c, n)):
                raise PrecisionError("no single-term pivot available for exact inversion")
            raise ZeroDivisionError("singular matrix")
        rows[c], rows[p] = rows[p], rows[c]
        inv = rows[c][c].invert()
        rows[c] = [x * inv for x in rows[c]]
        for i in range(n):
            if i != c and rows[i][c].terms:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return [r[n:] for r in rows]
