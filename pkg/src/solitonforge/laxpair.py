"""Lax connection, group-element propagation and the ratio (Riccati) checks.

The x- and t-parts of the connection are

    Ux = i [[lam, u], [v, -lam]]
    Ut = i [[lam^2 - uv/2, lam u - i u_x/2], [lam v + i v_x/2, -lam^2 + uv/2]]

and a group element solves ``g_x = Ux g``, ``g_t = Ut g``.  Values are
plain 2x2 numpy arrays; jet-valued matrices are nested 2x2 lists of
:class:`~solitonforge.numkit.CJet`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import DEFAULT_OT, DEFAULT_OX, variables
from .numkit import CJet, JetOrderError, JetZeroDivision, jet

I2 = np.eye(2, dtype=complex)
OVERFLOW_GUARD = 1e150


class PropagationError(ArithmeticError):
    """Group-element integration blew past the overflow guard or failed to converge."""


# -- 2x2 helpers -----------------------------------------------------------

def mat2_mul(a, b):
    """Product of two 2x2 matrices given as nested lists (jets or scalars)."""
    return [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]


def mat2_values(m):
    return np.array([[_val(m[i][j]) for j in range(2)] for i in range(2)], dtype=complex)


def _val(e):
    return e.value if isinstance(e, CJet) else complex(e)


# -- connection ------------------------------------------------------------

def ux_matrix(lam, u, v):
    """x-part of the connection, ``i [[lam, u], [v, -lam]]``."""
    u, v = _val(u), _val(v)
    return 1j * np.array([[lam, u], [v, -lam]], dtype=complex)


def ut_matrix(lam, u, v):
    """t-part of the connection; ``u`` and ``v`` are jets carrying an x-derivative."""
    if not (isinstance(u, CJet) and isinstance(v, CJet)) or u.ox < 1 or v.ox < 1:
        raise JetOrderError("ut_matrix needs jets with at least one x-derivative")
    uu, vv = u.value, v.value
    ux, vx = u.deriv(1), v.deriv(1)
    return 1j * np.array(
        [
            [lam**2 - uu * vv / 2, lam * uu - 0.5j * ux],
            [lam * vv + 0.5j * vx, -(lam**2) + uu * vv / 2],
        ],
        dtype=complex,
    )


def ux_jets(lam, u, v):
    return [[1j * lam + 0 * u, 1j * u], [1j * v, -1j * lam + 0 * u]]


def ut_jets(lam, u, v):
    """Jet-valued t-part; the result has one fewer x order than ``u``, ``v``."""
    ux, vx = u.dx(), v.dx()
    ox, ot = ux.orders
    u, v = u.truncate(ox, ot), v.truncate(ox, ot)
    uv = u * v
    return [
        [1j * (lam**2 - uv / 2), 1j * (lam * u - 0.5j * ux)],
        [1j * (lam * v + 0.5j * vx), 1j * (-(lam**2) + uv / 2)],
    ]


@dataclass(frozen=True)
class LaxConnection:
    lam: complex
    ux_part: np.ndarray
    ut_part: np.ndarray

    @classmethod
    def at(cls, fields, lam, x, t):
        u, v = fields.jets(x, t, 1, 0)
        return cls(lam, ux_matrix(lam, u, v), ut_matrix(lam, u, v))


def zero_curvature_residual(fields, lam, point):
    """``d_t Ux - d_x Ut + [Ux, Ut]`` at a point, with exact jet derivatives."""
    x, t = point
    u, v = fields.jets(x, t, 2, 1)
    ux_j = ux_jets(lam, u, v)
    ut_j = ut_jets(lam, u, v)
    d_t_ux = np.array([[_deriv_t(ux_j[i][j]) for j in range(2)] for i in range(2)])
    d_x_ut = np.array([[_deriv_x(ut_j[i][j]) for j in range(2)] for i in range(2)])
    A, B = mat2_values(ux_j), mat2_values(ut_j)
    return d_t_ux - d_x_ut + (A @ B - B @ A)


def _deriv_t(e):
    return e.deriv(0, 1) if isinstance(e, CJet) and e.ot >= 1 else 0.0


def _deriv_x(e):
    return e.deriv(1, 0) if isinstance(e, CJet) and e.ox >= 1 else 0.0


# -- group element ---------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    g: np.ndarray
    lam: complex
    base_point: tuple
    value_point: tuple
    path_defect: float = 0.0
    step: float = 0.0


def _rk4_leg(fields, lam, g, start, end, axis, n_steps):
    """Classical RK4 along one coordinate axis from ``start`` to ``end``."""
    x0, t0 = start
    s0 = start[axis]
    s1 = end[axis]
    if n_steps == 0 or s1 == s0:
        return g
    h = (s1 - s0) / n_steps

    def rhs(s, gg):
        p = (s, t0) if axis == 0 else (x0, s)
        if axis == 0:
            u, v = fields.values(*p)
            return ux_matrix(lam, u, v) @ gg
        u, v = fields.jets(p[0], p[1], 1, 0)
        return ut_matrix(lam, u, v) @ gg

    s = s0
    for k in range(n_steps):
        k1 = rhs(s, g)
        k2 = rhs(s + h / 2, g + h / 2 * k1)
        k3 = rhs(s + h / 2, g + h / 2 * k2)
        k4 = rhs(s + h, g + h * k3)
        g = g + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s = s0 + (k + 1) * h
        if not np.all(np.isfinite(g)) or np.abs(g).max() > OVERFLOW_GUARD:
            raise PropagationError(f"group element overflow near {axis and 't' or 'x'} = {s:.6g}")
    return g


def _path(fields, lam, g0, start, end, order, step):
    x0, t0 = start
    x1, t1 = end
    nx = int(np.ceil(abs(x1 - x0) / step)) if x1 != x0 else 0
    nt = int(np.ceil(abs(t1 - t0) / step)) if t1 != t0 else 0
    if order == "xt":
        g = _rk4_leg(fields, lam, g0, (x0, t0), (x1, t0), 0, nx)
        return _rk4_leg(fields, lam, g, (x1, t0), (x1, t1), 1, nt)
    g = _rk4_leg(fields, lam, g0, (x0, t0), (x0, t1), 1, nt)
    return _rk4_leg(fields, lam, g, (x0, t1), (x1, t1), 0, nx)


def propagate_g(fields, lam, start=(0.0, 0.0), end=(0.0, 0.0), step=0.02, order="xt",
                g0=None, tol=1e-6, max_halvings=10):
    """Integrate the Lax system for g along an axis-aligned path.

    The step is halved until the x-then-t and t-then-x results agree to
    ``tol`` (relative, Frobenius); that agreement is reported as
    ``path_defect``.  ``g0`` defaults to the identity at ``start``.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if order not in ("xt", "tx"):
        raise ValueError("order must be 'xt' or 'tx'")
    g0 = I2.copy() if g0 is None else np.array(g0, dtype=complex)
    h = step
    for _ in range(max_halvings + 1):
        g_xt = _path(fields, lam, g0, start, end, "xt", h)
        g_tx = _path(fields, lam, g0, start, end, "tx", h)
        defect = np.linalg.norm(g_xt - g_tx) / max(np.linalg.norm(g_xt), 1e-300)
        if defect <= tol:
            g = g_xt if order == "xt" else g_tx
            return GroupElement(g, lam, tuple(start), tuple(end), float(defect), h)
        h /= 2
    raise PropagationError(f"path-commutation defect {defect:.3e} above {tol:.1e} after halving")


def unitarity_defect(g):
    """Frobenius norm of ``g g^H - I``."""
    m = g.g if isinstance(g, GroupElement) else np.asarray(g, dtype=complex)
    return float(np.linalg.norm(m @ m.conj().T - I2))


def g_jet(fields, lam, g_value, point, ox=DEFAULT_OX, ot=DEFAULT_OT):
    """Taylor jet of a group element from its value at ``point``.

    The t-coefficients along the line through ``point`` follow from
    ``g_t = Ut g``, then each t-coefficient is extended in x with ``g_x = Ux g``.
    """
    x, t = point
    u, v = fields.jets(x, t, ox + 1, ot)
    ux_c = np.array([[_coef(e, ox, ot) for e in row] for row in ux_jets(lam, u, v)])
    ut_c = np.array([[_coef(e, ox, ot) for e in row] for row in ut_jets(lam, u, v)])
    # ux_c, ut_c: (2, 2, ox+1, ot+1)
    G = np.zeros((ox + 1, ot + 1, 2, 2), dtype=complex)
    G[0, 0] = np.asarray(g_value, dtype=complex)
    for b in range(ot):
        acc = np.zeros((2, 2), dtype=complex)
        for j in range(b + 1):
            acc += ut_c[:, :, 0, j] @ G[0, b - j]
        G[0, b + 1] = acc / (b + 1)
    for b in range(ot + 1):
        for a in range(ox):
            acc = np.zeros((2, 2), dtype=complex)
            for i in range(a + 1):
                for j in range(b + 1):
                    acc += ux_c[:, :, i, j] @ G[a - i, b - j]
            G[a + 1, b] = acc / (a + 1)
    return [[CJet(G[:, :, i, j]) for j in range(2)] for i in range(2)]


def _coef(e, ox, ot):
    return jet(e, ox, ot).c if isinstance(e, CJet) else CJet.const(e, ox, ot).c


class VacuumG:
    """Closed-form group element of the zero solution, ``diag(e^{i L}, e^{-i L})``.

    ``L = lam x + lam^2 t``; it equals the identity at the origin.
    """

    def __call__(self, lam, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        X, T = variables(x, t, ox, ot)
        phase = 1j * (lam * X + lam * lam * T)
        zero = CJet.const(0.0, ox, ot)
        return [[phase.exp(), zero], [zero, (-phase).exp()]]


class PropagatedG:
    """Group element of arbitrary fields: RK4 from g(0,0) = I, then the jet recursion."""

    def __init__(self, fields, step=0.02, tol=1e-6):
        self.fields = fields
        self.step = step
        self.tol = tol

    def __call__(self, lam, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        ge = propagate_g(self.fields, lam, (0.0, 0.0), (x, t), self.step, tol=self.tol)
        return g_jet(self.fields, lam, ge.g, (x, t), ox, ot)


# -- ratio of eigenvector components ---------------------------------------

@dataclass(frozen=True)
class RatioF:
    value: complex
    lam: complex
    alpha: complex
    jet: CJet = field(default=None, repr=False, compare=False)


def kernel_vector(g, alpha):
    """``g (1, alpha)^T`` for a value or jet matrix."""
    return g[0][0] + g[0][1] * alpha, g[1][0] + g[1][1] * alpha


def ratio_F(g, lam, alpha):
    """``F = (g c)_1 / (g c)_2`` with ``c = (1, alpha)``."""
    xi1, xi2 = kernel_vector(g, alpha)
    if _val(xi2) == 0:
        raise JetZeroDivision("second component of g c vanishes")
    F = xi1 / xi2
    if isinstance(F, CJet):
        return RatioF(F.value, lam, alpha, F)
    return RatioF(complex(F), lam, alpha)


def riccati_residual(fields, F, lam, point, which="x", form="F"):
    """Residual of the Riccati equation obeyed by ``F`` (or by ``1/F``).

    With ``F = xi_1 / xi_2``::

        F_x = i (u + 2 lam F - v F^2)
        F_t = i (b + 2 a F - c F^2)

    where ``a, b, c`` are the (1,1), (1,2), (2,1) entries of ``Ut / i``.  With
    ``form="inverse"`` the reciprocal ``H = 1/F`` is checked against
    ``H_x = i (v - 2 lam H - u H^2)`` and ``H_t = i (c - 2 a H - b H^2)``.
    """
    Fj = F.jet if isinstance(F, RatioF) else F
    if not isinstance(Fj, CJet):
        raise JetOrderError("riccati_residual needs F as a jet")
    if form == "inverse":
        Fj = Fj.reciprocal()
    elif form != "F":
        raise ValueError("form must be 'F' or 'inverse'")
    x, t = point
    u, v = fields.jets(x, t, 1, 0)
    f = Fj.value
    if which == "x":
        if form == "F":
            rhs = 1j * (u.value + 2 * lam * f - v.value * f * f)
        else:
            rhs = 1j * (v.value - 2 * lam * f - u.value * f * f)
        return Fj.deriv(1, 0) - rhs
    if which != "t":
        raise ValueError("which must be 'x' or 't'")
    ut = ut_matrix(lam, u, v) / 1j
    a, b, c = ut[0, 0], ut[0, 1], ut[1, 0]
    if form == "F":
        rhs = 1j * (b + 2 * a * f - c * f * f)
    else:
        rhs = 1j * (c - 2 * a * f - b * f * f)
    return Fj.deriv(0, 1) - rhs
