"""Point-evaluable solution pairs (u, v) and the PDE residuals they must satisfy."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .numkit import CJet, jet

DEFAULT_OX = 12
DEFAULT_OT = 2


def variables(x, t, ox, ot):
    """Jets of the coordinate functions x and t at (x, t)."""
    return CJet.var_x(x, ox, ot), CJet.var_t(t, ox, ot)


class FieldPair:
    """A solution (u, v) of the two-component system, evaluable as jets.

    Subclasses implement :meth:`jets`; everything else is derived from it.
    """

    def jets(self, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        raise NotImplementedError

    def values(self, x, t):
        u, v = self.jets(x, t, 0, 0)
        return u.value, v.value

    def sample(self, grid, threads=None):
        """Values of u and v on a grid, as two (nt, nx) complex arrays."""
        pts = list(grid.points())
        vals = map_points(lambda p: self.values(*p), pts, threads)
        arr = np.array(vals, dtype=complex).reshape(grid.nt, grid.nx, 2)
        return arr[..., 0], arr[..., 1]


class ExplicitFields(FieldPair):
    """Fields given by a closed form ``fn(X, T) -> (u, v)`` acting on coordinate jets.

    ``fn`` may return plain scalars for constant components.
    """

    def __init__(self, fn, name="explicit"):
        self.fn = fn
        self.name = name

    def jets(self, x, t, ox=DEFAULT_OX, ot=DEFAULT_OT):
        X, T = variables(x, t, ox, ot)
        u, v = self.fn(X, T)
        return jet(u, ox, ot), jet(v, ox, ot)

    def __repr__(self):
        return f"ExplicitFields({self.name})"


def vacuum():
    return ExplicitFields(lambda X, T: (0.0, 0.0), name="vacuum")


def plane_wave_sum(terms, component="v"):
    """Linear-equation seed: one component is a sum of plane waves, the other zero.

    ``terms`` is a list of ``(c, k)``.  For ``component="v"`` the waves are
    ``c exp(i(k x - k^2 t / 2))``, solving ``2i v_t + v_xx = 0``; for ``"u"`` the
    time sign flips so that ``-2i u_t + u_xx = 0``.
    """
    terms = [(complex(c), complex(k)) for c, k in terms]
    s = -0.5 if component == "v" else 0.5

    def fn(X, T):
        total = 0.0
        for c, k in terms:
            total = total + c * (1j * (k * X + s * k * k * T)).exp()
        return (0.0, total) if component == "v" else (total, 0.0)

    return ExplicitFields(fn, name=f"plane_waves[{component}]")


@dataclass(frozen=True)
class SampleGrid:
    x_min: float
    x_max: float
    nx: int
    t_min: float
    t_max: float
    nt: int

    def __post_init__(self):
        if self.nx < 2 or self.nt < 2:
            raise ValueError("grid needs nx, nt >= 2")
        if not self.x_min < self.x_max:
            raise ValueError("grid needs x_min < x_max")
        if not self.t_min <= self.t_max:
            raise ValueError("grid needs t_min <= t_max")

    @property
    def xs(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ts(self):
        return np.linspace(self.t_min, self.t_max, self.nt)

    def points(self):
        for t in self.ts:
            for x in self.xs:
                yield float(x), float(t)


def thread_count():
    try:
        return max(1, int(os.environ.get("SOLITONFORGE_THREADS", "1")))
    except ValueError:
        return 1


def map_points(fn, points, threads=None):
    threads = thread_count() if threads is None else threads
    if threads <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, points))


# -- residuals ------------------------------------------------------------

def scnl_residual_jets(u, v):
    """Residuals of -2i u_t + u_xx + 2uv u and 2i v_t + v_xx + 2uv v (values)."""
    ru = -2j * u.deriv(0, 1) + u.deriv(2, 0) + 2 * u.value * v.value * u.value
    rv = 2j * v.deriv(0, 1) + v.deriv(2, 0) + 2 * u.value * v.value * v.value
    return ru, rv


def scnl_relative_residual(fields, x, t):
    """SCNL residuals divided by their largest term (floored at 1); the larger of the two."""
    u, v = fields.jets(x, t, 2, 1)
    uv = u.value * v.value
    tu = [-2j * u.deriv(0, 1), u.deriv(2, 0), 2 * uv * u.value]
    tv = [2j * v.deriv(0, 1), v.deriv(2, 0), 2 * uv * v.value]
    return max(abs(sum(ts)) / max(1.0, max(abs(z) for z in ts)) for ts in (tu, tv))


def scnl_residual(fields, x, t):
    u, v = fields.jets(x, t, 2, 1)
    return scnl_residual_jets(u, v)


def cnl_residual_jet(psi):
    """Residual of -2i psi_t + psi_xx + 2 |psi|^2 psi."""
    p = psi.value
    return -2j * psi.deriv(0, 1) + psi.deriv(2, 0) + 2 * abs(p) ** 2 * p


def cnl_residual(fields, x, t, component="u"):
    u, v = fields.jets(x, t, 2, 1)
    return cnl_residual_jet(u if component == "u" else v.conj())
