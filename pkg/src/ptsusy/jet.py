"""Truncated Taylor arithmetic (forward-mode differentiation to any fixed order).

A :class:`Jet` stores normalized Taylor coefficients ``c[k] = f^(k)(x)/k!`` of a
complex-valued function at one or many evaluation points.  Coefficient arrays
have shape ``(order + 1, *points)`` so a whole grid is propagated at once.

The second-order jet (value, first and second derivative) is what most of the
package consumes; higher orders are used internally where a derivative of a
derivative is needed, or to expand a removable singularity in a series.
"""

from __future__ import annotations

import numbers

import numpy as np

from .errors import EvaluationError

TINY = 1e-300


def _check_divisor(c0):
    if np.any(np.abs(c0) < TINY):
        raise EvaluationError("division by a value with modulus below 1e-300")


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim == 0:
            c = c.reshape(1)
        self.c = c

    # -- construction -------------------------------------------------------
    @classmethod
    def variable(cls, x, order: int = 2) -> "Jet":
        """The independent variable itself, expanded about ``x``."""
        x = np.asarray(x, dtype=complex)
        c = np.zeros((order + 1,) + x.shape, dtype=complex)
        c[0] = x
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int = 2, shape=()) -> "Jet":
        c = np.zeros((order + 1,) + tuple(shape), dtype=complex)
        c[0] = value
        return cls(c)

    # -- views --------------------------------------------------------------
    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def v(self):
        return self.c[0]

    @property
    def d1(self):
        return self.c[1] if self.order >= 1 else np.zeros_like(self.c[0])

    @property
    def d2(self):
        return 2.0 * self.c[2] if self.order >= 2 else np.zeros_like(self.c[0])

    def derivative_value(self, k: int):
        """k-th derivative at the expansion point."""
        return float(np.prod(np.arange(1, k + 1))) * self.c[k]

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c[: order + 1])

    def deriv(self) -> "Jet":
        """Jet of the derivative function (one order lower)."""
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * len(self.shape))
        return Jet(self.c[1:] * k)

    def __getitem__(self, idx) -> "Jet":
        return Jet(self.c[(slice(None),) + (idx if isinstance(idx, tuple) else (idx,))])

    def real(self) -> "Jet":
        return Jet(self.c.real)

    def imag(self) -> "Jet":
        return Jet(self.c.imag)

    def conj(self) -> "Jet":
        return Jet(self.c.conj())

    def isfinite(self) -> bool:
        return bool(np.all(np.isfinite(self.c)))

    def __repr__(self):
        if self.c.ndim == 1:
            return f"Jet({', '.join(repr(complex(v)) for v in self.c)})"
        return f"Jet(order={self.order}, shape={self.shape})"

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        if isinstance(other, (numbers.Number, np.ndarray, np.generic)):
            c = np.zeros_like(self.c)
            c[0] = other
            return Jet(c)
        return NotImplemented

    @staticmethod
    def _align(a: "Jet", b: "Jet"):
        k = min(a.order, b.order)
        return a.c[: k + 1], b.c[: k + 1]

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(self, other)
        return Jet(a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(self, other)
        return Jet(a - b)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return Jet(self.c * other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(self, other)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
        for k in range(out.shape[0]):
            for j in range(k + 1):
                out[k] += a[j] * b[k - j]
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            if abs(other) < TINY:
                raise EvaluationError("division by a value with modulus below 1e-300")
            return Jet(self.c / other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(self, other)
        _check_divisor(b[0])
        q = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
        for k in range(q.shape[0]):
            acc = a[k].copy() if np.ndim(a[k]) else a[k]
            for j in range(1, k + 1):
                acc = acc - b[j] * q[k - j]
            q[k] = acc / b[0]
        return Jet(q)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, p):
        if isinstance(p, Jet):
            raise TypeError("jet exponents must be constants")
        p = complex(p)
        if p.imag == 0 and p.real == int(p.real) and abs(p.real) <= 64:
            n = int(p.real)
            if n == 0:
                return Jet.constant(1.0, self.order, self.shape)
            result = _ipow(self, abs(n))
            return result if n > 0 else 1.0 / result
        return self._cpow(p)

    def _cpow(self, p: complex) -> "Jet":
        # y = u**p satisfies u y' = p u' y.
        u = self.c
        _check_divisor(u[0])
        y = np.zeros_like(u)
        y[0] = u[0] ** p
        for k in range(1, u.shape[0]):
            acc = np.zeros_like(u[0])
            for j in range(1, k + 1):
                acc = acc + (p * j - (k - j)) * u[j] * y[k - j]
            y[k] = acc / (k * u[0])
        return Jet(y)

    # -- elementary functions ----------------------------------------------
    def exp(self) -> "Jet":
        u = self.c
        y = np.zeros_like(u)
        y[0] = np.exp(u[0])
        for k in range(1, u.shape[0]):
            acc = np.zeros_like(u[0])
            for j in range(1, k + 1):
                acc = acc + j * u[j] * y[k - j]
            y[k] = acc / k
        return Jet(y)

    def log(self) -> "Jet":
        u = self.c
        _check_divisor(u[0])
        y = np.zeros_like(u)
        y[0] = np.log(u[0])
        for k in range(1, u.shape[0]):
            acc = k * u[k]
            for j in range(1, k):
                acc = acc - j * y[j] * u[k - j]
            y[k] = acc / (k * u[0])
        return Jet(y)

    def _sincos(self, hyperbolic: bool):
        u = self.c
        s = np.zeros_like(u)
        c = np.zeros_like(u)
        if hyperbolic:
            s[0], c[0] = np.sinh(u[0]), np.cosh(u[0])
        else:
            s[0], c[0] = np.sin(u[0]), np.cos(u[0])
        sign = 1.0 if hyperbolic else -1.0
        for k in range(1, u.shape[0]):
            acc_s = np.zeros_like(u[0])
            acc_c = np.zeros_like(u[0])
            for j in range(1, k + 1):
                acc_s = acc_s + j * u[j] * c[k - j]
                acc_c = acc_c + j * u[j] * s[k - j]
            s[k] = acc_s / k
            c[k] = sign * acc_c / k
        return Jet(s), Jet(c)

    def sin(self) -> "Jet":
        return self._sincos(False)[0]

    def cos(self) -> "Jet":
        return self._sincos(False)[1]

    def sinh(self) -> "Jet":
        return self._sincos(True)[0]

    def cosh(self) -> "Jet":
        return self._sincos(True)[1]

    def tanh(self) -> "Jet":
        s, c = self._sincos(True)
        return s / c

    def sqrt(self) -> "Jet":
        return self._cpow(0.5)


def _ipow(base: Jet, n: int) -> Jet:
    result = None
    square = base
    while n:
        if n & 1:
            result = square if result is None else result * square
        n >>= 1
        if n:
            square = square * square
    return result


def taylor_shift(coeffs, t):
    """Re-expand ``sum_k coeffs[k] s**k`` about ``s = t``.

    ``coeffs`` has shape ``(K + 1,)`` (a series about one point), ``t`` is an
    array of offsets; the result has shape ``(K + 1, *t.shape)``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    t = np.asarray(t, dtype=complex)
    K = coeffs.shape[0] - 1
    out = np.zeros((K + 1,) + t.shape, dtype=complex)
    # Horner on the polynomial, carrying all derivatives (synthetic division).
    work = np.broadcast_to(coeffs.reshape((-1,) + (1,) * t.ndim), (K + 1,) + t.shape).copy()
    for j in range(K + 1):
        for k in range(K - 1, j - 1, -1):
            work[k] = work[k] + t * work[k + 1]
        out[j] = work[j]
    return out
