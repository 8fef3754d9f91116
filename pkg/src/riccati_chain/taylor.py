"""Truncated Taylor series arithmetic.

A :class:`Taylor` holds normalized coefficients ``f^(k)(x0)/k!`` for
``k = 0..order``. Coefficients may be floats or numpy arrays (one series per
grid node); all operations broadcast.
"""

from __future__ import annotations

from math import factorial
from typing import Sequence

import numpy as np


class Taylor:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence) -> None:
        self.coeffs = tuple(np.asarray(c, dtype=float) if np.ndim(c) else float(c) for c in coeffs)
        if not self.coeffs:
            raise ValueError("a Taylor series needs at least one coefficient")

    @classmethod
    def variable(cls, x0, order: int = 3) -> Taylor:
        return cls([x0, 1.0] + [0.0] * (order - 1)) if order >= 1 else cls([x0])

    @classmethod
    def constant(cls, value, order: int = 3) -> Taylor:
        return cls([value] + [0.0] * order)

    @classmethod
    def from_derivatives(cls, derivs: Sequence) -> Taylor:
        return cls([np.asarray(d, dtype=float) / factorial(k) for k, d in enumerate(derivs)])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivative(self, k: int):
        """k-th derivative at the expansion point."""
        return self.coeffs[k] * factorial(k)

    def derivatives(self) -> list:
        return [self.derivative(k) for k in range(len(self.coeffs))]

    def truncate(self, order: int) -> Taylor:
        return Taylor(self.coeffs[: order + 1])

    def __repr__(self) -> str:
        return f"Taylor({list(self.coeffs)!r})"

    # arithmetic

    def _lift(self, other) -> Taylor:
        if isinstance(other, Taylor):
            return other
        return Taylor([other] + [0.0] * self.order)

    def _common(self, other: Taylor) -> int:
        return min(self.order, other.order)

    def __add__(self, other):
        other = self._lift(other)
        n = self._common(other)
        return Taylor([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return Taylor([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Taylor):
            return Taylor([c * other for c in self.coeffs])
        n = self._common(other)
        a, b = self.coeffs, other.coeffs
        return Taylor([sum(a[j] * b[k - j] for j in range(k + 1)) for k in range(n + 1)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Taylor):
            return Taylor([c / other for c in self.coeffs])
        n = self._common(other)
        a, b = self.coeffs, other.coeffs
        if np.any(np.asarray(b[0]) == 0):
            raise ZeroDivisionError("Taylor division by a series with zero constant term")
        q: list = []
        for k in range(n + 1):
            s = a[k] - sum(b[j] * q[k - j] for j in range(1, k + 1))
            q.append(s / b[0])
        return Taylor(q)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return 1.0 / (self ** (-n))
        result = Taylor.constant(1.0, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # elementary functions, via the usual coefficient recurrences

    def exp(self) -> Taylor:
        a = self.coeffs
        e = [np.exp(a[0])]
        for k in range(1, len(a)):
            e.append(sum(j * a[j] * e[k - j] for j in range(1, k + 1)) / k)
        return Taylor(e)

    def log(self) -> Taylor:
        a = self.coeffs
        if np.any(np.asarray(a[0]) <= 0):
            raise ValueError("log of a non-positive value")
        out = [np.log(a[0])]
        for k in range(1, len(a)):
            s = a[k] - sum(j * out[j] * a[k - j] for j in range(1, k)) / k
            out.append(s / a[0])
        return Taylor(out)

    def _sincos(self) -> tuple[Taylor, Taylor]:
        a = self.coeffs
        s, c = [np.sin(a[0])], [np.cos(a[0])]
        for k in range(1, len(a)):
            s.append(sum(j * a[j] * c[k - j] for j in range(1, k + 1)) / k)
            c.append(-sum(j * a[j] * s[k - j] for j in range(1, k + 1)) / k)
        return Taylor(s), Taylor(c)

    def sin(self) -> Taylor:
        return self._sincos()[0]

    def cos(self) -> Taylor:
        return self._sincos()[1]

    def tan(self) -> Taylor:
        s, c = self._sincos()
        return s / c

    def antiderivative(self, value) -> Taylor:
        """Series of F with F' = self and F(x0) = value."""
        return Taylor([value] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def finite(self) -> bool:
        return all(np.all(np.isfinite(c)) for c in self.coeffs)


Jet3 = Taylor  # order-3 jets are Taylor series truncated after the cubic term


def jet3(x0) -> Taylor:
    return Taylor.variable(x0, 3)
