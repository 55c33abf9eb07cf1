"""Morphisms of Artinian BCAs, trace maps K(B) -> K(A) and f_#.

A morphism f: A -> B is given by a tower of TLF steps K_A -> K_B and the
images of A's nilpotent generators.  On coefficients it is assumed that
f . sigma_0^A = sigma_0^B . (tower map); this covers the surjection-then-
coefficient-extension shapes the traces are computed for.
"""
from __future__ import annotations

from math import factorial

from ..errors import DescriptorMismatchError, PrecisionError, UnsupportedShapeError
from ..forms import Form, res_tower
from ..linalg import c_transpose, c_zeros, k_rank
from ..series import Laurent, apply_step
from .algebra import ArtinianBca, CoeffField
from .duals import DualElement, dual_eval_coeff, dual_module, psi
from .modules import FinLenModule, quotient_module


def map_through(x: Laurent, steps, window=None) -> Laurent:
    for step in steps:
        x = apply_step(x, step, window)
    return x


class BcaMorphism:
    def __init__(self, source: ArtinianBca, target: ArtinianBca, tower=(), images=None):
        tower = tuple(tower)
        cur = source.coeff_tlf
        for step in tower:
            if step.source != cur:
                raise DescriptorMismatchError(f"tower step {step} does not start at {cur}")
            cur = step.target
        if cur != target.coeff_tlf:
            raise DescriptorMismatchError(f"tower ends at {cur}, target coefficients are {target.coeff_tlf}")
        images = dict(images or {})
        for v in source.nilp_vars:
            if v not in images:
                raise KeyError(f"no image given for {v}")
        extra = set(images) - set(source.nilp_vars)
        if extra:
            raise KeyError(f"images given for unknown variables {sorted(extra)}")
        self.source = source
        self.target = target
        self.tower = tower
        self.images = [list(images[v]) for v in source.nilp_vars]
        for v, y in zip(source.nilp_vars, self.images):
            if len(y) != target.length:
                raise ValueError(f"image of {v} has the wrong length")
            if not target.in_max_ideal(y):
                raise ValueError(f"image of {v} is not in the maximal ideal of the target")
        self._powers = {}
        for g in source.ideal:
            if not target.is_zero(self._monomial_image(g)):
                raise ValueError(f"the ideal generator {g} does not map to zero")

    @classmethod
    def identity(cls, A: ArtinianBca) -> "BcaMorphism":
        return cls(A, A, (), {v: A.var(v) for v in A.nilp_vars})

    @classmethod
    def structure(cls, K_bca: ArtinianBca, B: ArtinianBca, tower=()) -> "BcaMorphism":
        """The structure map from a field (no nilpotents) into B."""
        return cls(K_bca, B, tower, {})

    def _monomial_image(self, m):
        m = tuple(m)
        hit = self._powers.get(m)
        if hit is None:
            B = self.target
            hit = B.one()
            for y, k in zip(self.images, m):
                for _ in range(k):
                    hit = B.mul(hit, y)
            self._powers[m] = hit
        return hit

    def map_coeff(self, lam: Laurent, window=None) -> Laurent:
        return map_through(lam, self.tower, window)

    def apply(self, x, window=None) -> list:
        B = self.target
        out = B.zero()
        for m, a in zip(self.source.basis, x):
            if not a.terms and a.window is None:
                continue
            out = B.add(out, B.scale(self._monomial_image(m), self.map_coeff(a, window)))
        return out

    def compose(self, other: "BcaMorphism") -> "BcaMorphism":
        """other . self (apply self first)."""
        if other.source != self.target:
            raise DescriptorMismatchError("morphisms are not composable")
        images = {v: other.apply(y) for v, y in zip(self.source.nilp_vars, self.images)}
        return BcaMorphism(self.source, other.target, self.tower + other.tower, images)

    def __str__(self):
        steps = ", ".join(str(s) for s in self.tower) or "identity on coefficients"
        return f"{self.source} -> {self.target} ({steps})"


def extend_coefficient_field(f: BcaMorphism, sigma: CoeffField, window=None) -> CoeffField:
    """A coefficient field tau of B with tau . (tower map) = f . sigma."""
    A, B = f.source, f.target
    if sigma.bca != A:
        raise DescriptorMismatchError("coefficient field lives on a different algebra")
    eps = {v: f.apply(x, window) for v, x in sigma.eps.items()}
    steps = list(f.tower)
    for i, step in enumerate(steps):
        if step.kind == "laurent_step":
            eps[step.var] = B.zero()
        elif step.kind == "kummer_step":
            target = eps.pop(step.var)
            eps[step.new_var] = _solve_kummer(B, step, steps[i + 1:], target, window)
    return CoeffField(B, eps)


def _solve_kummer(B: ArtinianBca, step, rest, target, window):
    """eta in m_B with sum_{k>=1} h^(k)(u)/k! eta^k = target, h(u) = u^e g(u)."""
    if B.is_zero(target):
        return B.zero()
    tgt = step.target
    j = step.position
    shift = [0] * tgt.dim
    shift[j] = step.e
    h = step.g_series().shift(shift)
    H = []
    d = h
    for k in range(1, B.top_degree + 1):
        d = d.derive(step.new_var)
        H.append(map_through(d * (tgt.coeff_field.one / factorial(k)), rest, window))
    H1 = H[0]
    if len(H1.terms) == 1 and H1.window is None:
        inv = H1.invert()
    elif window is not None:
        inv = H1.invert(window)
    else:
        raise PrecisionError("solving the substitution needs a precision window")
    eta = B.scale(target, inv)
    for _ in range(B.top_degree + 1):
        higher = B.zero()
        power = eta
        for Hk in H[1:]:
            power = B.mul(power, eta)
            higher = B.add(higher, B.scale(power, Hk))
        eta = B.scale(B.sub(target, higher), inv)
    return eta


def trace_map(f: BcaMorphism, sigma: CoeffField, phi: DualElement, window=None) -> DualElement:
    """Tr_{B/A; sigma}: K(B) -> K(A), both as duals under the canonical fields."""
    A, B = f.source, f.target
    MA = FinLenModule.from_bca(A)
    MB = phi.module
    if MB.bca != B or MB.length != B.length:
        raise DescriptorMismatchError("phi must be a dual element of the target algebra")
    sigma0_B = CoeffField.canonical(B)
    if phi.sigma != sigma0_B:
        phi = psi(phi.sigma, sigma0_B, MB, phi)
    tau = extend_coefficient_field(f, sigma, window)
    lifted = psi(sigma0_B, tau, MB, phi)
    coeffs = []
    for i, m in enumerate(A.basis):
        y = f.apply(A.monomial(m), window)
        val = dual_eval_coeff(lifted, y)
        form = res_tower(Form.top(val), f.tower, window)
        coeffs.append(form.top_coeff())
    on_A = DualElement(MA, sigma, coeffs)
    return psi(sigma, CoeffField.canonical(A), MA, on_A)


def trace_gram_rank(f: BcaMorphism, sigma: CoeffField, basis_L=None) -> tuple:
    """(rank, expected, exact) of phi -> (Tr(b phi))_b over a K_A-basis of B.

    ``basis_L`` is a K_A-basis of K_B as Laurent elements (default [1]); the
    pairing B x K(B) -> K(A) is nondegenerate iff rank == expected.
    """
    A, B = f.source, f.target
    tlfB = B.coeff_tlf
    if basis_L is None:
        if f.tower:
            raise UnsupportedShapeError("a basis of the coefficient extension is required")
        basis_L = [tlfB.one()]
    MB = FinLenModule.from_bca(B)
    KB = dual_module(MB)
    mult_basis = [B.scale(B.monomial(m), b) for b in basis_L for m in B.basis]
    cols = []
    for b in basis_L:
        for a in range(KB.length):
            coords = [tlfB.zero() for _ in range(KB.length)]
            coords[a] = b
            phi = KB.element(coords)
            col = []
            for y in mult_basis:
                t = trace_map(f, sigma, phi.acted(y))
                col.extend(t.coeffs)
            cols.append(col)
    rows = c_transpose(cols)
    rank, exact = k_rank(rows)
    return rank, len(cols), exact


# -- f_#

def _prime_value(F, c):
    """The prime-field value of c, or None when c is not a prime-field constant."""
    k = F.kind
    if k in ("rationals", "prime_field"):
        return c
    if k == "rational_functions":
        if c.den != F.ring.one or not c.num.is_ground:
            return None
        return F._ground_to_fraction(c.num.LC) if c.num else F.base.zero
    if any(c.c[1:]):
        return None
    return _prime_value(F.base, c.c[0])


def constant_matrix(bca: ArtinianBca, x) -> list:
    """Prime-field coefficients of an algebra element; raises when not constant."""
    F = bca.coeff_tlf.coeff_field
    zero_exp = (0,) * bca.coeff_tlf.dim
    out = []
    for a in x:
        if a.window is not None or any(e != zero_exp for e in a.terms):
            raise UnsupportedShapeError("image has non-constant coefficients")
        c = a.terms.get(zero_exp)
        if c is None:
            out.append(bca.czero)
            continue
        v = _prime_value(F, c)
        if v is None:
            raise UnsupportedShapeError("image has non-constant coefficients")
        out.append(v)
    return out


def dual_action_module(M: FinLenModule):
    """Dual_{sigma_0} M with its A-action: (module, P)."""
    D = dual_module(M)
    return D.module, D.P


def tensor_module(f: BcaMorphism, N: FinLenModule):
    """B (x)_A N for f with constant images and no coefficient extension."""
    if f.tower:
        raise UnsupportedShapeError("f_# needs coefficient fields identified by f")
    A, B = f.source, f.target
    MB = FinLenModule.from_bca(B)
    zero = A.czero
    nb, nn = MB.length, N.length
    dim = nb * nn

    def idx(b, n):
        return b * nn + n

    images = [constant_matrix(B, y) for y in f.images]
    # f(t_j) acting on B as a constant matrix
    img_mats = []
    for y in images:
        mat = c_zeros(nb, nb, zero)
        for m, coeff in zip(B.basis, y):
            if coeff:
                Nm = MB.monomial_action(m)
                for r in range(nb):
                    for c in range(nb):
                        if Nm[r][c]:
                            mat[r][c] = mat[r][c] + coeff * Nm[r][c]
        img_mats.append(mat)
    relations = []
    for j, F in enumerate(img_mats):
        Nj = N.actions[j]
        for b in range(nb):
            for n in range(nn):
                v = [zero] * dim
                for r in range(nb):
                    if F[r][b]:
                        v[idx(r, n)] = v[idx(r, n)] + F[r][b]
                for r in range(nn):
                    if Nj[r][n]:
                        v[idx(b, r)] = v[idx(b, r)] - Nj[r][n]
                relations.append(v)
    # B acts on the left factor
    actions = []
    for Nb in MB.actions:
        mat = c_zeros(dim, dim, zero)
        for b in range(nb):
            for r in range(nb):
                if Nb[r][b]:
                    for n in range(nn):
                        mat[idx(r, n)][idx(b, n)] = Nb[r][b]
        actions.append(mat)
    return quotient_module(B, dim, actions, relations)[0]


def f_sharp(f: BcaMorphism, M: FinLenModule) -> FinLenModule:
    """f_# M = Dual_B(B (x)_A Dual_A M)."""
    DM, _ = dual_action_module(M)
    T = tensor_module(f, DM)
    return dual_module(T).module
