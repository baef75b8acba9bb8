"""Truncated Taylor arithmetic in one variable.

A :class:`Jet` of order ``n`` holds the normalized Taylor coefficients
``t_k = f^(k)(u) / k!`` for ``k = 0..n``.  Coefficients may be floats or
numpy arrays (one jet per sample), so the same expression evaluates a
pointwise quantity and its u-derivatives on a whole grid at once.

Used wherever a formula needs exact derivatives of a composite
u-function: Christoffel derivatives of the (u, s) metric, the flattening
residual and its dependence on the fourth derivative of the exponent.
"""

from math import factorial

import numpy as np


class Jet:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = list(coeffs)
        if not self.coeffs:
            raise ValueError("a jet needs at least one coefficient")

    @classmethod
    def from_derivatives(cls, derivs):
        return cls([d / factorial(k) for k, d in enumerate(derivs)])

    @classmethod
    def constant(cls, value, order):
        zero = np.zeros_like(value) if isinstance(value, np.ndarray) else 0.0
        return cls([value] + [zero] * order)

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivative(self, k=1):
        """Return f^(k) as a plain value (not a jet)."""
        return self.coeffs[k] * factorial(k)

    def derivatives(self):
        return [c * factorial(k) for k, c in enumerate(self.coeffs)]

    def diff(self):
        """The jet of f', one order lower."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet([(k + 1) * c for k, c in enumerate(self.coeffs[1:])])

    def truncate(self, order):
        return Jet(self.coeffs[: order + 1])

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def __neg__(self):
        return Jet([-c for c in self.coeffs])

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        return Jet([a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([c * other for c in self.coeffs])
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        return Jet([sum(a[j] * b[k - j] for j in range(k + 1)) for k in range(n + 1)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet([c / other for c in self.coeffs])
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        q = []
        for k in range(n + 1):
            acc = a[k]
            for j in range(1, k + 1):
                acc = acc - b[j] * q[k - j]
            q.append(acc / b[0])
        return Jet(q)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        a = self.coeffs
        y = [a[0] ** p]
        for k in range(1, self.order + 1):
            acc = 0.0
            for j in range(1, k + 1):
                acc = acc + ((p + 1) * j - k) * a[j] * y[k - j]
            y.append(acc / (k * a[0]))
        return Jet(y)

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.value!r})"


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    a = x.coeffs
    e = [np.exp(a[0])]
    for k in range(1, x.order + 1):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + j * a[j] * e[k - j]
        e.append(acc / k)
    return Jet(e)


def log(x):
    if not isinstance(x, Jet):
        return np.log(x)
    a = x.coeffs
    out = [np.log(a[0])]
    for k in range(1, x.order + 1):
        acc = a[k]
        for j in range(1, k):
            acc = acc - j * out[j] * a[k - j] / k
        out.append(acc / a[0])
    return Jet(out)


def sqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(x)
    return x ** 0.5
