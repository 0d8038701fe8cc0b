"""Truncated bivariate Taylor jets with complex coefficients.

A jet stores ``c[a, b] = d^a/dx^a d^b/dt^b f / (a! b!)`` for ``a <= ox`` and
``b <= ot``.  Arithmetic follows the truncated Cauchy product, and analytic
functions are applied by composing their power series around the value
coefficient, so every derivative carried by a jet is exact up to roundoff.
"""
from __future__ import annotations

from math import factorial
from numbers import Number

import numpy as np


class JetOrderError(ValueError):
    """Raised when jets of different (or insufficient) orders are combined."""


class JetZeroDivision(ZeroDivisionError):
    """Raised for division, log or sqrt of a jet whose value coefficient is zero."""


def _as_coeffs(coeffs):
    arr = np.array(coeffs, dtype=complex)
    if arr.ndim != 2:
        raise JetOrderError("jet coefficients must be a 2-d array")
    return arr


class CJet:
    """Truncated Taylor expansion of a complex field f(x, t) at a point."""

    __slots__ = ("c",)
    __array_ufunc__ = None

    def __init__(self, coeffs):
        self.c = _as_coeffs(coeffs)
        self.c.setflags(write=False)

    # -- construction -----------------------------------------------------
    @classmethod
    def const(cls, value, ox=0, ot=0):
        c = np.zeros((ox + 1, ot + 1), dtype=complex)
        c[0, 0] = value
        return cls(c)

    @classmethod
    def var_x(cls, x0, ox, ot):
        """The coordinate function x expanded at x0."""
        c = np.zeros((ox + 1, ot + 1), dtype=complex)
        c[0, 0] = x0
        if ox >= 1:
            c[1, 0] = 1.0
        return cls(c)

    @classmethod
    def var_t(cls, t0, ox, ot):
        c = np.zeros((ox + 1, ot + 1), dtype=complex)
        c[0, 0] = t0
        if ot >= 1:
            c[0, 1] = 1.0
        return cls(c)

    # -- accessors --------------------------------------------------------
    @property
    def ox(self):
        return self.c.shape[0] - 1

    @property
    def ot(self):
        return self.c.shape[1] - 1

    @property
    def orders(self):
        return (self.ox, self.ot)

    @property
    def value(self):
        return complex(self.c[0, 0])

    def deriv(self, i, j=0):
        """Return d^i/dx^i d^j/dt^j f at the expansion point."""
        if i > self.ox or j > self.ot:
            raise JetOrderError(f"derivative ({i}, {j}) exceeds jet orders {self.orders}")
        return complex(self.c[i, j]) * factorial(i) * factorial(j)

    def dx(self):
        """Jet of the x-derivative (one fewer x order)."""
        if self.ox < 1:
            raise JetOrderError("cannot differentiate a jet with ox = 0")
        k = np.arange(1, self.ox + 1)[:, None]
        return CJet(self.c[1:, :] * k)

    def dt(self):
        if self.ot < 1:
            raise JetOrderError("cannot differentiate a jet with ot = 0")
        k = np.arange(1, self.ot + 1)[None, :]
        return CJet(self.c[:, 1:] * k)

    def truncate(self, ox, ot):
        if ox > self.ox or ot > self.ot:
            raise JetOrderError(f"cannot raise jet orders {self.orders} to {(ox, ot)}")
        return CJet(self.c[: ox + 1, : ot + 1])

    def conj(self):
        """Jet of the complex conjugate field (x and t are real)."""
        return CJet(self.c.conj())

    def is_close(self, other, rtol=1e-12, atol=0.0):
        other = _coerce(other, self.orders)
        scale = max(np.abs(self.c).max(), np.abs(other.c).max())
        return bool(np.abs(self.c - other.c).max() <= atol + rtol * scale)

    def __repr__(self):
        return f"CJet(ox={self.ox}, ot={self.ot}, value={self.value:.6g})"

    # -- arithmetic -------------------------------------------------------
    def _check(self, other):
        if self.c.shape != other.c.shape:
            raise JetOrderError(f"jet order mismatch: {self.orders} vs {other.orders}")

    def __add__(self, other):
        if isinstance(other, Number):
            c = self.c.copy()
            c[0, 0] += other
            return CJet(c)
        if not isinstance(other, CJet):
            return NotImplemented
        self._check(other)
        return CJet(self.c + other.c)

    __radd__ = __add__

    def __neg__(self):
        return CJet(-self.c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, Number):
            return self + (-other)
        if not isinstance(other, CJet):
            return NotImplemented
        self._check(other)
        return CJet(self.c - other.c)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return CJet(self.c * other)
        if not isinstance(other, CJet):
            return NotImplemented
        self._check(other)
        return CJet(_cauchy(self.c, other.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            if other == 0:
                raise JetZeroDivision("division of a jet by zero")
            return CJet(self.c / other)
        if not isinstance(other, CJet):
            return NotImplemented
        self._check(other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = CJet.const(1.0, self.ox, self.ot)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- analytic functions ---------------------------------------------
    def reciprocal(self):
        a0 = self.value
        if a0 == 0:
            raise JetZeroDivision("reciprocal of a jet with zero value")
        K = self.ox + self.ot
        coef = [(-1) ** k / a0 ** (k + 1) for k in range(K + 1)]
        return _compose(self, coef)

    def exp(self):
        a0 = self.value
        e0 = np.exp(a0)
        coef = [e0 / factorial(k) for k in range(self.ox + self.ot + 1)]
        return _compose(self, coef)

    def log(self):
        a0 = self.value
        if a0 == 0:
            raise JetZeroDivision("log of a jet with zero value")
        coef = [np.log(a0)] + [
            (-1) ** (k + 1) / (k * a0**k) for k in range(1, self.ox + self.ot + 1)
        ]
        return _compose(self, coef)

    def sqrt(self, branch=1):
        """Square root; ``branch=1`` is the principal branch, ``-1`` its negative."""
        a0 = self.value
        if a0 == 0:
            raise JetZeroDivision("sqrt of a jet with zero value")
        r0 = branch * np.sqrt(complex(a0))
        coef = []
        binom = 1.0
        for k in range(self.ox + self.ot + 1):
            coef.append(binom * r0 / a0**k)
            binom *= (0.5 - k) / (k + 1)
        return _compose(self, coef)


def _cauchy(a, b):
    nx, nt = a.shape
    out = np.zeros_like(a)
    for i in range(nx):
        for j in range(nt):
            aij = a[i, j]
            if aij != 0:
                out[i:, j:] += aij * b[: nx - i, : nt - j]
    return out


def _compose(a, coef):
    """Evaluate sum_k coef[k] (a - a0)^k with a Horner scheme; (a - a0) is nilpotent."""
    h = a.c.copy()
    h[0, 0] = 0.0
    out = np.zeros_like(h)
    out[0, 0] = coef[-1]
    for ck in reversed(coef[:-1]):
        out = _cauchy(out, h)
        out[0, 0] += ck
    return CJet(out)


def _coerce(value, orders):
    if isinstance(value, CJet):
        return value
    return CJet.const(value, *orders)


def jet(value, ox, ot):
    """Promote a scalar to a constant jet, or check the orders of an existing jet."""
    if isinstance(value, CJet):
        if value.orders != (ox, ot):
            return value.truncate(ox, ot)
        return value
    return CJet.const(value, ox, ot)


def jexp(a):
    return a.exp() if isinstance(a, CJet) else np.exp(a)


def jlog(a):
    return a.log() if isinstance(a, CJet) else np.log(a)


def jsqrt(a, branch=1):
    return a.sqrt(branch) if isinstance(a, CJet) else branch * np.sqrt(complex(a))


def jconj(a):
    return a.conj() if isinstance(a, CJet) else np.conj(a)


def jet_arith(a, op, b):
    """Apply one of ``+ - * /`` to two jets of equal orders."""
    ops = {
        "+": lambda p, q: p + q,
        "-": lambda p, q: p - q,
        "*": lambda p, q: p * q,
        "/": lambda p, q: p / q,
    }
    try:
        fn = ops[op]
    except KeyError:
        raise ValueError(f"unknown jet operation {op!r}") from None
    return fn(a, b)


def jet_exp_log(a, which):
    """Apply ``exp``, ``log`` or principal ``sqrt`` to a jet."""
    if which == "exp":
        return a.exp()
    if which == "log":
        return a.log()
    if which == "sqrt":
        return a.sqrt()
    raise ValueError(f"unknown jet function {which!r}")


def align(*jets):
    """Truncate jets (scalars pass through) to their common minimal orders."""
    orders = [j.orders for j in jets if isinstance(j, CJet)]
    if not orders:
        return jets
    ox = min(o[0] for o in orders)
    ot = min(o[1] for o in orders)
    return tuple(j.truncate(ox, ot) if isinstance(j, CJet) else j for j in jets)
