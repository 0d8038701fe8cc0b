"""Discrete substitution, the ladders it generates, compatibility checks of one dressing factor, and energy.

The substitution maps a solution (u, v) to

    U = 1/v,   V = v (u v + (ln v)_xx)

with inverse ``v = 1/U, u = U (U V + (ln U)_xx)``.  Each application consumes
two x-orders of the input jets.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import DEFAULT_OT, DEFAULT_OX, ExplicitFields, FieldPair, map_points
from .numkit import CJet, JetZeroDivision, align, jet, jet_det
from .soliton_engine import DressingSingularity, single_dressing


class LadderSingularity(ArithmeticError):
    """The substitution hit a zero component."""


# -- the substitution -------------------------------------------------------

def discrete_forward_jets(u, v):
    if v.value == 0:
        raise LadderSingularity("v vanishes; forward substitution undefined")
    lv = v.log().dx().dx()
    u, v, lv = align(u, v, lv)
    return 1 / v, v * (u * v + lv)


def discrete_inverse_jets(U, V):
    if U.value == 0:
        raise LadderSingularity("U vanishes; inverse substitution undefined")
    lU = U.log().dx().dx()
    U, V, lU = align(U, V, lU)
    return U * (U * V + lU), 1 / U


def discrete_forward(fields, point, ox=DEFAULT_OX, ot=DEFAULT_OT):
    """``(U, V)`` at ``point`` as jets of orders ``(ox - 2, ot)``."""
    u, v = fields.jets(*point, ox, ot)
    return discrete_forward_jets(u, v)


def discrete_inverse(fields, point, ox=DEFAULT_OX, ot=DEFAULT_OT):
    U, V = fields.jets(*point, ox, ot)
    return discrete_inverse_jets(U, V)


class SubstitutedFields(FieldPair):
    """``fields`` after ``steps`` applications of the substitution (negative: inverse)."""

    def __init__(self, fields, steps):
        self.fields = fields
        self.steps = steps

    def jets(self, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        n = abs(self.steps)
        u, v = self.fields.jets(x, t, ox + 2 * n, ot)
        step = discrete_forward_jets if self.steps > 0 else discrete_inverse_jets
        for _ in range(n):
            u, v = step(u, v)
        return u, v


@dataclass
class LadderState:
    """Position ``m`` on the substitution ladder with the snapshots visited."""

    m: int
    fields: FieldPair
    history: list = field(default_factory=list)

    def forward(self):
        nxt = SubstitutedFields(self.fields, 1)
        return LadderState(self.m + 1, nxt, self.history + [(self.m, self.fields)])

    def inverse(self):
        nxt = SubstitutedFields(self.fields, -1)
        return LadderState(self.m - 1, nxt, self.history + [(self.m, self.fields)])


# -- sigma1 ladder ----------------------------------------------------------

def _pprime(mus, j):
    p = 1.0 + 0j
    for i, m in enumerate(mus):
        if i != j:
            p *= (mus[j] - m) ** 2
    return p


def sigma1_seed(half):
    """Conjugate-closed plane-wave seed ``v0`` for a 2m-step ladder.

    ``half`` lists ``(k, d)`` with ``Im k != 0``; each wave ``d exp(i(k x -
    k^2 t/2))`` is joined by its partner at ``conj(k)`` whose amplitude makes
    the rung-2m field equal ``conj(v0)``.  Returns ``(fields, ks, ds)``.
    """
    ks, ds = [], []
    for k, d in half:
        k, d = complex(k), complex(d)
        if k.imag == 0:
            raise ValueError("sigma1 seed wavenumbers need Im k != 0")
        ks += [k, k.conjugate()]
        ds += [d, None]
    mus = [1j * k for k in ks]
    for j in range(0, len(ks), 2):
        ds[j + 1] = 1.0 / (np.conj(ds[j]) * _pprime(mus, j + 1))
    terms = list(zip(ks, ds))

    def fn(X, T):
        total = 0.0
        for k, d in terms:
            total = total + d * (1j * (k * X - 0.5 * k * k * T)).exp()
        return 0.0, total

    return ExplicitFields(fn, name="sigma1_seed"), ks, ds


def sigma1_midpoint(seed, m):
    """Rung m of the ladder started at a (0, v0) seed; a sigma1-invariant solution.

    Built from Hankel determinants rather than m substitutions: the values
    agree, but the high jet coefficients are far more accurate, which matters
    once further substitutions are applied.
    """
    return HankelFields(lambda X, T: seed.fn(X, T)[1], m)


def sigma1_ladder_check(fields, m, grid):
    """Max defect between ``m`` forward steps and the sigma1 image of ``m`` inverse steps.

    The sigma1 involution swaps ``u <-> conj(v)``, so the check compares
    ``U^{+m}`` with ``conj(v^{-m})`` and ``V^{+m}`` with ``conj(u^{-m})``.
    For ``m = 0`` this is ``max |u - conj(v)|``.
    """
    fwd = SubstitutedFields(fields, m)
    bwd = SubstitutedFields(fields, -m)

    def one(p):
        U, V = fwd.jets(*p, 0, 0)
        u, v = bwd.jets(*p, 0, 0)
        return max(abs(U.value - np.conj(v.value)), abs(V.value - np.conj(u.value)))

    return float(max(map_points(one, list(grid.points()))))


def sigma1_ladder_from_seed(seed, m, grid):
    """Ladder check about the rung-m midpoint of a :func:`sigma1_seed` with m wave pairs."""
    return sigma1_ladder_check(sigma1_midpoint(seed, m), m, grid)


# -- Hankel ladder ----------------------------------------------------------

@dataclass
class HankelLadder:
    """Determinants ``D_s`` of ``[d^{i+j} F / dx^{i+j}]`` at one point, as jets."""

    F: CJet
    Ds: list

    @classmethod
    def build(cls, F, s_max):
        derivs = [F]
        for _ in range(2 * s_max):
            derivs.append(derivs[-1].dx())
        orders = derivs[-1].orders
        derivs = [d.truncate(*orders) for d in derivs]
        Ds = [CJet.const(1.0, *orders)]
        for s in range(1, s_max + 1):
            Ds.append(jet_det([[derivs[i + j] for j in range(s)] for i in range(s)]))
        return cls(F, Ds)

    def rung(self, s):
        """``(u_s, v_s) = (D_{s-1}/D_s, D_{s+1}/D_s)``; ``u_0 = 0``."""
        Ds = self.Ds
        if s + 1 >= len(Ds):
            raise ValueError(f"ladder built only up to D_{len(Ds) - 1}")
        if Ds[s].value == 0:
            raise LadderSingularity(f"D_{s} vanishes")
        v = Ds[s + 1] / Ds[s]
        u = 0 * v if s == 0 else Ds[s - 1] / Ds[s]
        return u, v


class HankelFields(FieldPair):
    """Rung ``s`` of the ladder of a seed ``F(X, T) -> jet``, as a field pair."""

    def __init__(self, F, s):
        self.F = F
        self.s = s

    def jets(self, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        big = ox + 2 * self.s + 2
        X, T = CJet.var_x(x, big, ot), CJet.var_t(t, big, ot)
        u, v = HankelLadder.build(jet(self.F(X, T), big, ot), self.s + 1).rung(self.s)
        return u.truncate(ox, ot), v.truncate(ox, ot)


def hankel_ladder(F, s, point, ox=None, ot=DEFAULT_OT):
    """Rung ``s`` of the ladder generated by the seed ``F`` (a callable ``(X, T) -> jet``)."""
    ox = 2 * s + 6 if ox is None else ox
    X, T = CJet.var_x(point[0], ox, ot), CJet.var_t(point[1], ox, ot)
    return HankelLadder.build(F(X, T), s + 1).rung(s)


# -- factor compatibility system ------------------------------------------------

@dataclass(frozen=True)
class AppendixParams:
    """``k`` is the trace ``A + D = -(lambda1 + lambda2)``; ``eps = ((lambda1 - lambda2)/2)^2``."""

    k: complex
    eps: complex

    @classmethod
    def from_roots(cls, lambda1, lambda2):
        return cls(-(lambda1 + lambda2), ((lambda1 - lambda2) / 2) ** 2)


def bc_system_residual(B, C, params):
    """Residuals of the closed evolution system for the off-diagonal factor entries.

    With ``q = eps - B C``::

        i B_t = B_xx/2 - B^2 C + (C B_x^2/4 + B B_x C_x/2 + i k B^2 C_x/2 + k^2 B^2 C/4) / q
       -i C_t = C_xx/2 - C^2 B + (B C_x^2/4 + C B_x C_x/2 - i k C^2 B_x/2 + k^2 C^2 B/4) / q

    ``B``, ``C`` need jets with ox >= 2, ot >= 1.
    """
    k, eps = params.k, params.eps
    b, c = B.value, C.value
    bx, cx = B.deriv(1), C.deriv(1)
    q = eps - b * c
    rb = 1j * B.deriv(0, 1) - (
        B.deriv(2) / 2 - b * b * c
        + (c * bx**2 / 4 + b * bx * cx / 2 + 0.5j * k * b * b * cx + k * k * b * b * c / 4) / q
    )
    rc = -1j * C.deriv(0, 1) - (
        C.deriv(2) / 2 - c * c * b
        + (b * cx**2 / 4 + c * bx * cx / 2 - 0.5j * k * c * c * bx + k * k * c * c * b / 4) / q
    )
    return rb, rc


def bc_system_residual_printed(B, C, params):
    """A variant with linear ``k`` terms and only the ``B_x^2``/``C_x^2`` quotient.

    It is not satisfied by dressed factors; it is reported next to the
    closed system as a comparison value.
    """
    k, eps = params.k, params.eps
    b, c = B.value, C.value
    bx, cx = B.deriv(1), C.deriv(1)
    q = eps - c * b
    rc = (-1j * C.deriv(0, 1) - 0.5 * (C.deriv(2) + 4j * k * cx + 4 * k * k * c)
          - c * (b * c) + cx**2 * b / (4 * q))
    rb = (1j * B.deriv(0, 1) - 0.5 * (B.deriv(2) - 4j * k * bx + 4 * k * k * b)
          - b * (b * c) + bx**2 * c / (4 * q))
    return rb, rc


def reconstruct_fields(B, C, params, branch=1):
    """Recover the pre-dressing (u, v) from B, C on one sqrt branch.

    ``u = B + (i B_x - k B)/(2s)``, ``v = -C - (i C_x + k C)/(2s)`` with
    ``s = branch * sqrt(eps - B C)`` (so ``s = (A - D)/2`` on the matching branch).
    """
    s = (params.eps - B * C).sqrt(branch)
    Bx, Cx = B.dx(), C.dx()
    B, C, s, Bx, Cx = align(B, C, s, Bx, Cx)
    u = B + (1j * Bx - params.k * B) / (2 * s)
    v = -C - (1j * Cx + params.k * C) / (2 * s)
    return u, v


@dataclass
class AppendixReport:
    system_residual: float
    printed_system_residual: float
    reconstruction_defect: float
    branch_map: list
    trace_spread: float
    det_spread: float
    trace_mean: complex
    det_mean: complex
    det_vs_roots: float
    branch_failures: list
    degenerate_points: list


def appendix_residuals(fields, g_provider, lambda1, alpha1, grid, lambda2=None, alpha2=None,
                       branch_tol=1e-6, degenerate_tol=1e-8):
    """Check a single dressing step of ``fields`` against its B, C compatibility system on a grid.

    Where ``q = eps - B C`` vanishes (relative to ``eps``) the closed system and
    the reconstruction divide by zero; such points are listed in
    ``degenerate_points`` and left out of the residual maxima.  The trace and
    determinant invariants are still evaluated there.
    """
    pts = list(grid.points())
    nan = float("nan")

    def one(p):
        f = single_dressing(fields, g_provider, lambda1, alpha1, p, lambda2, alpha2, 3, 1)
        params = AppendixParams.from_roots(f.lambda1, f.lambda2)
        inv = (f.trace, f.det_constant, f.lambda1 * f.lambda2)
        if abs(params.eps - f.B.value * f.C.value) <= degenerate_tol * abs(params.eps):
            return (nan, nan, nan, 0) + inv
        rb, rc = bc_system_residual(f.B, f.C, params)
        pb, pc = bc_system_residual_printed(f.B, f.C, params)
        u, v = fields.jets(*p, 0, 0)
        defects = []
        for br in (1, -1):
            ur, vr = reconstruct_fields(f.B, f.C, params, br)
            defects.append(max(abs(ur.value - u.value), abs(vr.value - v.value)))
        best = int(np.argmin(defects))
        return (max(abs(rb), abs(rc)), max(abs(pb), abs(pc)), defects[best], (1, -1)[best]) + inv

    rows = map_points(one, pts)
    tr = np.array([r[4] for r in rows])
    dt = np.array([r[5] for r in rows])
    roots = rows[0][6]
    recon = np.array([r[2] for r in rows])
    ok = np.isfinite(recon)
    failures = [pts[i] for i in np.flatnonzero(ok & (recon > branch_tol))]
    worst = lambda col: float(np.nanmax([r[col] for r in rows])) if ok.any() else nan
    return AppendixReport(
        system_residual=worst(0),
        printed_system_residual=worst(1),
        reconstruction_defect=worst(2),
        branch_map=[r[3] for r in rows],
        trace_spread=float(np.std(tr) / max(abs(tr.mean()), 1.0)),
        det_spread=float(np.std(dt) / max(abs(dt.mean()), 1.0)),
        trace_mean=complex(tr.mean()),
        det_mean=complex(dt.mean()),
        det_vs_roots=float(np.abs(dt - roots).max()),
        branch_failures=failures,
        degenerate_points=[pts[i] for i in np.flatnonzero(~ok)],
    )


# -- energy -----------------------------------------------------------------

@dataclass(frozen=True)
class EnergyResult:
    raw: float
    normalized: float
    boundary_max: float
    decayed: bool


def energy(psi, xs, reference=None, decay_tol=1e-6):
    """Trapezoid quadrature of ``|psi|^2`` over x.

    ``reference`` is the raw one-soliton value used for normalisation; when
    omitted the normalised value is NaN.  A boundary value above
    ``decay_tol`` is flagged in the result, not raised.
    """
    psi = np.asarray(psi, dtype=complex)
    xs = np.asarray(xs, dtype=float)
    dens = np.abs(psi) ** 2
    raw = float(np.trapezoid(dens, xs)) if hasattr(np, "trapezoid") else float(np.trapz(dens, xs))
    bmax = float(max(abs(psi[0]), abs(psi[-1])))
    norm = raw / reference if reference else float("nan")
    return EnergyResult(raw, norm, bmax, bmax < decay_tol)


def one_soliton_energy(lam, xs, t=0.0, alpha=1.0):
    """Raw energy of the one-soliton with spectral parameter ``lam`` (quadrature)."""
    from .soliton_engine import SolitonSpec, nsoliton

    f = nsoliton(SolitonSpec([(lam, alpha)]))
    psi = [f.values(float(x), t)[0] for x in xs]
    return energy(psi, xs).raw


def safe_values(fields, p):
    try:
        return fields.values(*p)
    except (DressingSingularity, LadderSingularity, JetZeroDivision):
        return (complex(np.nan, np.nan),) * 2
