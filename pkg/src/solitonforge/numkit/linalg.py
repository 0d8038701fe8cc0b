"""Small dense complex linear algebra.

LU factorisation with partial pivoting, solves and determinants for the
handful-of-unknowns systems met in dressing constructions, plus their
Taylor-jet counterparts.
"""
from __future__ import annotations

from itertools import permutations

import numpy as np

from .jets import CJet

PIVOT_RTOL = 1e-13


class SingularMatrixError(ArithmeticError):
    """A pivot fell below the singularity threshold.

    Attributes
    ----------
    pivot_index : int
        Elimination step (0-based) at which the pivot failed.
    pivot : float
        Magnitude of the failing pivot.
    """

    def __init__(self, pivot_index, pivot, threshold):
        super().__init__(
            f"singular matrix: |pivot| = {pivot:.3e} at step {pivot_index} "
            f"(threshold {threshold:.3e})"
        )
        self.pivot_index = pivot_index
        self.pivot = pivot
        self.threshold = threshold


def _as_square(M):
    M = np.array(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def lu_factor(M, rtol=PIVOT_RTOL, check=True):
    """Doolittle LU with partial (row) pivoting.

    Returns ``(lu, perm, sign)`` where ``lu`` packs unit-lower ``L`` below the
    diagonal and ``U`` on and above it, ``perm`` is the row permutation and
    ``sign`` its parity.  With ``check`` set, a pivot smaller than
    ``rtol * max_row_norm`` raises :class:`SingularMatrixError`.
    """
    lu = _as_square(M)
    n = lu.shape[0]
    perm = np.arange(n)
    sign = 1
    row_norms = np.linalg.norm(lu, axis=1)
    threshold = rtol * (row_norms.max() if n else 0.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        piv = lu[k, k]
        if check and (abs(piv) < threshold or piv == 0):
            raise SingularMatrixError(k, abs(piv), threshold)
        if piv == 0:
            continue
        lu[k + 1 :, k] /= piv
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm, sign


def lu_substitute(lu, perm, b):
    """Solve with a packed factorisation from :func:`lu_factor`."""
    b = np.asarray(b, dtype=complex)
    y = b[perm].copy()
    n = lu.shape[0]
    for i in range(n):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1 :] @ y[i + 1 :]) / lu[i, i]
    return y


def lu_solve(M, b):
    """Solve ``M x = b`` by partial-pivoting LU."""
    lu, perm, _ = lu_factor(M)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != lu.shape[0]:
        raise ValueError("right-hand side length does not match the matrix")
    return lu_substitute(lu, perm, b)


def determinant(M):
    """Determinant as the signed product of LU pivots (0 for singular input)."""
    lu, _, sign = lu_factor(M, check=False)
    d = np.prod(np.diag(lu)) if lu.shape[0] else 1.0
    return complex(sign * d)


# -- jet-valued systems ---------------------------------------------------

def jet_solve(M, b):
    """Solve a linear system whose entries are jets.

    ``M`` is an n x n nested list of :class:`CJet` (or scalars) and ``b`` a
    list of n jets.  The value matrix is factorised once; higher Taylor
    coefficients follow from ``M0 x[a,b] = b[a,b] - sum M[i,j] x[a-i,b-j]``
    in increasing (a, b).
    """
    n = len(M)
    orders = _common_orders([e for row in M for e in row] + list(b))
    ox, ot = orders
    Mc = np.zeros((n, n, ox + 1, ot + 1), dtype=complex)
    bc = np.zeros((n, ox + 1, ot + 1), dtype=complex)
    for i in range(n):
        for j in range(n):
            Mc[i, j] = _coeffs(M[i][j], orders)
        bc[i] = _coeffs(b[i], orders)
    lu, perm, _ = lu_factor(Mc[:, :, 0, 0])
    xc = np.zeros_like(bc)
    for a in range(ox + 1):
        for bb in range(ot + 1):
            rhs = bc[:, a, bb].copy()
            for i in range(a + 1):
                for j in range(bb + 1):
                    if i == 0 and j == 0:
                        continue
                    rhs -= Mc[:, :, i, j] @ xc[:, a - i, bb - j]
            xc[:, a, bb] = lu_substitute(lu, perm, rhs)
    return [CJet(xc[i]) for i in range(n)]


def jet_det(M):
    """Determinant of a small jet-valued matrix.

    Gaussian elimination pivoting on value magnitude; falls back to the
    Leibniz expansion when no pivot with a nonzero value exists.
    """
    n = len(M)
    if n == 0:
        return 1.0
    orders = _common_orders([e for row in M for e in row])
    rows = [[_jetify(e, orders) for e in row] for row in M]
    det = CJet.const(1.0, *orders)
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(rows[r][k].value))
        if rows[p][k].value == 0:
            return det * _leibniz([row[k:] for row in rows[k:]], orders)
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            det = -det
        piv = rows[k][k]
        det = det * piv
        inv = piv.reciprocal()
        for r in range(k + 1, n):
            f = rows[r][k] * inv
            rows[r] = [rows[r][c] - f * rows[k][c] if c > k else rows[r][c] for c in range(n)]
    return det


def _leibniz(M, orders):
    n = len(M)
    total = CJet.const(0.0, *orders)
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        term = CJet.const(-1.0 if inv % 2 else 1.0, *orders)
        for i in range(n):
            term = term * M[i][p[i]]
        total = total + term
    return total


def _common_orders(entries):
    orders = {e.orders for e in entries if isinstance(e, CJet)}
    if not orders:
        return (0, 0)
    return (min(o[0] for o in orders), min(o[1] for o in orders))


def _jetify(e, orders):
    if isinstance(e, CJet):
        return e if e.orders == orders else e.truncate(*orders)
    return CJet.const(e, *orders)


def _coeffs(e, orders):
    return _jetify(e, orders).c
