"""Dressing (Backlund) construction of new solutions from a known one.

A dressing step multiplies the group element by ``P(lam) = [[lam + A, B],
[C, lam + D]]`` chosen so that ``P(mu) g(mu) c = 0`` at two points ``mu``.
The new fields are ``U = u - 2B``, ``V = v + 2C``.  The n-step version uses
matrix polynomials with monic diagonal of degree n and is obtained from one
linear solve; both routes are provided so they can be checked against each
other.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import DEFAULT_OT, DEFAULT_OX, FieldPair, map_points, vacuum
from .laxpair import VacuumG, kernel_vector, mat2_mul, ratio_F
from .numkit import CJet, SingularMatrixError, determinant, jet, jet_solve


class DressingSingularity(ArithmeticError):
    """The kernel data are degenerate at a point (coincident ratios or singular system)."""

    def __init__(self, msg, point=None):
        super().__init__(msg if point is None else f"{msg} at (x, t) = {point}")
        self.point = point


# -- parameters -------------------------------------------------------------

def conjugate_pair(lambda1, alpha1):
    """Partner kernel data ``(conj(lam), -1/conj(alpha))`` that keeps u = conj(v)."""
    if alpha1 == 0:
        raise ValueError("alpha must be nonzero")
    return complex(np.conj(lambda1)), complex(-1.0 / np.conj(alpha1))


@dataclass(frozen=True)
class SolitonSpec:
    """Kernel data for an n-step dressing.

    ``pairs`` holds ``(lambda_k, alpha_k)``.  With ``enforce_sigma1`` each pair
    gets the partner from :func:`conjugate_pair`; otherwise ``partners`` must
    list the second kernel point of every step explicitly.
    """

    pairs: tuple
    enforce_sigma1: bool = True
    partners: tuple = None
    conventions: dict = field(default_factory=lambda: {"F": "xi1/xi2", "trace_sign": -1})

    def __post_init__(self):
        pairs = tuple((complex(l), complex(a)) for l, a in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if self.partners is not None:
            object.__setattr__(
                self, "partners", tuple((complex(l), complex(a)) for l, a in self.partners)
            )
        for lam, alpha in pairs:
            if alpha == 0:
                raise ValueError("alpha_k must be nonzero")
        if self.enforce_sigma1:
            if any(lam.imag == 0 for lam, _ in pairs):
                raise ValueError("sigma1 dressing needs Im(lambda_k) != 0")
        elif self.partners is None or len(self.partners) != len(pairs):
            raise ValueError("without sigma1 every pair needs an explicit partner")
        pts = [mu for mu, _ in self.kernel_points()]
        for i in range(len(pts)):
            for j in range(i):
                if abs(pts[i] - pts[j]) < 1e-12:
                    raise ValueError("dressing points must be pairwise distinct")

    @property
    def n(self):
        return len(self.pairs)

    def steps(self):
        """Per-step ``(lam1, alpha1, lam2, alpha2)``."""
        out = []
        for k, (lam, alpha) in enumerate(self.pairs):
            if self.enforce_sigma1:
                lam2, alpha2 = conjugate_pair(lam, alpha)
            else:
                lam2, alpha2 = self.partners[k]
            out.append((lam, alpha, lam2, alpha2))
        return out

    def kernel_points(self):
        pts = []
        for lam1, a1, lam2, a2 in self.steps():
            pts += [(lam1, a1), (lam2, a2)]
        return pts

    def permuted(self, order):
        partners = None if self.partners is None else tuple(self.partners[i] for i in order)
        return SolitonSpec(tuple(self.pairs[i] for i in order), self.enforce_sigma1, partners)


# -- single step ------------------------------------------------------------

@dataclass(frozen=True)
class DressingFactor:
    """``P(lam) = [[lam + A, B], [C, lam + D]]`` with roots ``lambda1``, ``lambda2``."""

    A: CJet
    B: CJet
    C: CJet
    D: CJet
    lambda1: complex
    lambda2: complex

    def matrix(self, lam):
        return [[self.A + lam, self.B], [self.C, self.D + lam]]

    def det_at(self, lam):
        return (lam + self.A.value) * (lam + self.D.value) - self.B.value * self.C.value

    @property
    def trace(self):
        return (self.A + self.D).value

    @property
    def det_constant(self):
        return (self.A * self.D - self.B * self.C).value


def dressing_from_ratios(F1, F2, lambda1, lambda2):
    """Closed forms for A, B, C, D from the two kernel ratios (jets or scalars)."""
    dF = F1 - F2
    if _v(dF) == 0:
        raise DressingSingularity("kernel ratios coincide (F1 = F2)")
    dl = lambda1 - lambda2
    C = -dl / dF
    B = dl * F1 * F2 / dF
    A = -lambda1 - B / F1
    D = -lambda1 - C * F1
    return A, B, C, D


def single_dressing(fields, g_provider, lambda1, alpha1, point, lambda2=None, alpha2=None,
                    ox=DEFAULT_OX, ot=DEFAULT_OT):
    """Dressing factor at ``point`` for kernel data (lambda1, alpha1), (lambda2, alpha2).

    The partner defaults to :func:`conjugate_pair`.  ``fields`` is accepted for
    symmetry with the other constructions; only ``g_provider`` is consulted.
    """
    if lambda2 is None:
        lambda2, alpha2 = conjugate_pair(lambda1, alpha1)
    x, t = point
    F1 = ratio_F(g_provider(lambda1, x, t, ox, ot), lambda1, alpha1).jet
    F2 = ratio_F(g_provider(lambda2, x, t, ox, ot), lambda2, alpha2).jet
    try:
        A, B, C, D = dressing_from_ratios(F1, F2, lambda1, lambda2)
    except DressingSingularity as exc:
        raise DressingSingularity(str(exc), point) from None
    return DressingFactor(A, B, C, D, complex(lambda1), complex(lambda2))


def apply_dressing(u, v, factor):
    """New fields ``(u - 2B, v + 2C)``."""
    return u - 2 * factor.B, v + 2 * factor.C


class ChainDressedFields(FieldPair):
    """Fields after applying single dressing steps one after another.

    Step k uses the group element produced by steps 1..k-1, so the result can
    be compared with the one-shot :func:`direct_n_dressing`.
    """

    def __init__(self, seed, g_provider, steps):
        self.seed = seed
        self.g_provider = g_provider
        self.steps = [tuple(complex(s) for s in step) for step in steps]

    def factors(self, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        g = self.g_provider
        out = []
        for lam1, a1, lam2, a2 in self.steps:
            f = single_dressing(None, g, lam1, a1, (x, t), lam2, a2, ox, ot)
            out.append(f)
            g = _FixedFactorG(g, f)
        return out, g

    def jets(self, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        u, v = self.seed.jets(x, t, ox, ot)
        factors, _ = self.factors(x, t, ox, ot)
        for f in factors:
            u, v = apply_dressing(u, v, f)
        return u, v

    def group_element(self, lam, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        _, g = self.factors(x, t, ox, ot)
        return g(lam, x, t, ox, ot)


class _FixedFactorG:
    def __init__(self, inner, factor):
        self.inner = inner
        self.factor = factor

    def __call__(self, lam, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        P = self.factor.matrix(lam)
        if P[0][0].orders != (ox, ot):
            P = [[jet(e, ox, ot) for e in row] for row in P]
        return mat2_mul(P, self.inner(lam, x, t, ox, ot))


# -- n steps at once --------------------------------------------------------

@dataclass(frozen=True)
class PolynomialDressing:
    """Coefficient lists (ascending powers) of the n-step factor's entries.

    ``P11`` and ``P22`` are monic of degree n; ``P12``, ``P21`` have degree <= n-1.
    """

    n: int
    P11: tuple
    P12: tuple
    P21: tuple
    P22: tuple

    def matrix_value(self, lam):
        ev = lambda c: sum(ck * lam**k for k, ck in enumerate(c))
        return np.array([[ev(self.P11), ev(self.P12)], [ev(self.P21), ev(self.P22)]])


def _kernel_rows(spec, g_provider, x, t, ox, ot):
    rows = []
    for mu, alpha in spec.kernel_points():
        xi1, xi2 = kernel_vector(g_provider(mu, x, t, ox, ot), alpha)
        xi1, xi2 = jet(xi1, ox, ot), jet(xi2, ox, ot)
        scale = max(abs(xi1.value), abs(xi2.value))
        if scale == 0:
            raise DressingSingularity("kernel vector vanishes", (x, t))
        rows.append((complex(mu), xi1 / scale, xi2 / scale))
    return rows


def _block_solve(rows, n, lead):
    """Solve one block row of the kernel conditions.

    For row ``(mu, xi1, xi2)`` the unknowns ``(p^{n-1..0}, q^{n-1..0})`` satisfy
    ``sum p^k mu^k xi1 + sum q^k mu^k xi2 = -mu^n * lead`` where ``lead`` picks
    ``xi1`` (first block row) or ``xi2`` (second).
    """
    M, b = [], []
    for mu, xi1, xi2 in rows:
        powers = [mu ** (n - 1 - k) for k in range(n)]
        M.append([xi1 * p for p in powers] + [xi2 * p for p in powers])
        b.append(-(mu**n) * (xi1 if lead == 1 else xi2))
    return jet_solve(M, b)


def direct_dressing_jets(spec, fields, g_provider, point, ox=DEFAULT_OX, ot=DEFAULT_OT):
    """One-shot n-step dressing at ``point``; returns ``(U, V, PolynomialDressing)`` as jets.

    The 2n kernel conditions ``P(mu_j) g(mu_j) c_j = 0`` split into two 2n x 2n
    systems, one per row of ``P``; they are solved with :func:`jet_solve`.
    """
    n = spec.n
    x, t = point
    u, v = fields.jets(x, t, ox, ot)
    if n == 0:
        one = CJet.const(1.0, ox, ot)
        return u, v, PolynomialDressing(0, (one,), (), (), (one,))
    rows = _kernel_rows(spec, g_provider, x, t, ox, ot)
    try:
        top = _block_solve(rows, n, lead=1)
        bottom = _block_solve(rows, n, lead=2)
    except SingularMatrixError as exc:
        raise DressingSingularity(f"singular kernel system ({exc})", point) from None
    one = CJet.const(1.0, ox, ot)
    poly = PolynomialDressing(
        n,
        tuple(top[:n][::-1]) + (one,),
        tuple(top[n:][::-1]),
        tuple(bottom[:n][::-1]),
        tuple(bottom[n:][::-1]) + (one,),
    )
    p12, p21 = top[n], bottom[0]
    return u - 2 * p12, v + 2 * p21, poly


def direct_n_dressing(spec, fields, g_provider, point):
    """Values ``(U, V)`` of the n-step dressed solution at ``point``."""
    U, V, _ = direct_dressing_jets(spec, fields, g_provider, point, 0, 0)
    return U.value, V.value


def kernel_ratios(spec, g_provider, point):
    """Values of ``F_j = (g c_j)_1 / (g c_j)_2`` at the 2n kernel points."""
    x, t = point
    return [ratio_F(g_provider(mu, x, t, 0, 0), mu, a).value for mu, a in spec.kernel_points()]


def cramer_p_coefficients(spec, F_values, point=None):
    """Leading off-diagonal coefficients ``(P12^{n-1}, P21^{n-1})`` by Cramer's rule.

    Rows of the first system are ``(mu^{n-1}, .., 1, mu^{n-1}/F, .., 1/F)``
    with right-hand side ``-mu^n``; the second uses ``(F mu^{n-1}, .., F,
    mu^{n-1}, .., 1)``.  Rows are rescaled by a common factor for
    floating-point range only; the ratios are unaffected.
    """
    n = spec.n
    mus = [mu for mu, _ in spec.kernel_points()]
    if len(F_values) != 2 * n:
        raise ValueError("need one ratio per kernel point")
    den1, num1, den2, num2 = [], [], [], []
    for mu, F in zip(mus, F_values):
        F = complex(F)
        pw = [mu ** (n - 1 - k) for k in range(n)]
        if abs(F) < 1:
            r1, lead1 = [p * F for p in pw] + pw, mu**n * F
            r2, lead2 = [p * F for p in pw] + pw, mu**n
        else:
            r1, lead1 = pw + [p / F for p in pw], mu**n
            r2, lead2 = pw + [p / F for p in pw], mu**n / F
        den1.append(r1)
        num1.append(r1[:n] + [lead1] + r1[n + 1:])
        den2.append(r2)
        num2.append([lead2] + r2[1:])
    d1, d2 = determinant(den1), determinant(den2)
    if d1 == 0 or d2 == 0:
        raise DressingSingularity("vanishing Cramer denominator", point)
    return -determinant(num1) / d1, -determinant(num2) / d2


class DirectDressedFields(FieldPair):
    """Fields of the one-shot n-step dressing of ``seed``."""

    def __init__(self, spec, seed=None, g_provider=None):
        self.spec = spec
        self.seed = vacuum() if seed is None else seed
        self.g_provider = VacuumG() if g_provider is None else g_provider

    def jets(self, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        U, V, _ = direct_dressing_jets(self.spec, self.seed, self.g_provider, (x, t), ox, ot)
        return U, V

    def polynomial(self, x, t, ox=0, ot=0):
        return direct_dressing_jets(self.spec, self.seed, self.g_provider, (x, t), ox, ot)[2]


def nsoliton(spec):
    """The n-soliton obtained by dressing the zero solution."""
    return DirectDressedFields(spec, vacuum(), VacuumG())


@dataclass
class SampledSolution:
    U: np.ndarray
    V: np.ndarray
    singular_points: list


def nsoliton_field(spec, grid, threads=None):
    """Sample the n-soliton ``psi = U`` (and ``V = conj(U)``) on a grid.

    Points where the dressing is singular are left as NaN and listed.
    """
    fields = nsoliton(spec)
    pts = list(grid.points())

    def one(p):
        try:
            return fields.values(*p)
        except DressingSingularity:
            return (complex(np.nan, np.nan), complex(np.nan, np.nan))

    vals = np.array(map_points(one, pts, threads), dtype=complex).reshape(grid.nt, grid.nx, 2)
    bad = [pts[i] for i in np.flatnonzero(np.isnan(vals[..., 0].ravel()))]
    return SampledSolution(vals[..., 0], vals[..., 1], bad)


def _v(e):
    return e.value if isinstance(e, CJet) else e
