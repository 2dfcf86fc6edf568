"""Truncated Taylor expansions ("jets") in one variable.

A :class:`Jet` of order ``n`` centred at ``c`` stores the normalised Taylor
coefficients ``coeffs[j] = f^(j)(c) / j!`` for ``j = 0..n``.  Arithmetic is
truncated Cauchy-product arithmetic, so every operation is exact to order
``n``.  Coefficients may be any field elements that support ``+ - * /``
(``Fraction`` works for the rational operations); the transcendental
operations go through :mod:`mpmath`.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import mpmath as mp

__all__ = ["Jet", "jet_arith", "jet_fn"]


class Jet:
    """Order-``n`` jet of a scalar function of one variable."""

    __slots__ = ("center", "coeffs")

    def __init__(self, center, coeffs: Iterable):
        self.center = center
        self.coeffs = list(coeffs)
        if not self.coeffs:
            raise ValueError("a jet needs at least one coefficient")

    # -- constructors -------------------------------------------------------

    @classmethod
    def variable(cls, center, order: int, one=None) -> "Jet":
        """The identity function ``x`` expanded at ``center``.

        ``one`` defaults to ``center ** 0`` so the coefficients share its type.
        """
        if one is None:
            one = center**0
        zero = one - one
        return cls(center, [center, one] + [zero] * (order - 1) if order >= 1 else [center])

    @classmethod
    def constant(cls, value, center, order: int) -> "Jet":
        zero = value - value
        return cls(center, [value] + [zero] * order)

    # -- accessors ----------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivative_value(self, j: int):
        """``f^(j)(center)``."""
        return self.coeffs[j] * math.factorial(j)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.center, self.coeffs[: order + 1])

    def deriv(self) -> "Jet":
        """Jet of ``f'`` (one order lower)."""
        if self.order < 1:
            raise ValueError("derivative of an order-0 jet is undefined")
        return Jet(self.center, [(j + 1) * c for j, c in enumerate(self.coeffs[1:])])

    def __repr__(self) -> str:
        return f"Jet(center={self.center!r}, coeffs={self.coeffs!r})"

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError(f"jet order mismatch: {self.order} vs {other.order}")
            return other
        return Jet.constant(other, self.center, self.order)

    def __neg__(self) -> "Jet":
        return Jet(self.center, [-c for c in self.coeffs])

    def __add__(self, other) -> "Jet":
        o = self._coerce(other)
        return Jet(self.center, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        o = self._coerce(other)
        return Jet(self.center, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.center, [c * other for c in self.coeffs])
        o = self._coerce(other)
        a, b = self.coeffs, o.coeffs
        return Jet(self.center, [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(len(a))])

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.center, [c / other for c in self.coeffs])
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def reciprocal(self) -> "Jet":
        b = self.coeffs
        if b[0] == 0:
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        c = [1 / b[0]]
        for k in range(1, len(b)):
            c.append(-sum(b[j] * c[k - j] for j in range(1, k + 1)) / b[0])
        return Jet(self.center, c)

    def __pow__(self, q) -> "Jet":
        if isinstance(q, int) and q >= 0:
            out = Jet.constant(self.coeffs[0] ** 0, self.center, self.order)
            base = self
            while q:
                if q & 1:
                    out = out * base
                base = base * base
                q >>= 1
            return out
        return self.pow(q)

    # -- elementary functions -----------------------------------------------

    def pow(self, q) -> "Jet":
        """``f**q`` for real ``q``; requires ``f(center) > 0``."""
        a = self.coeffs
        if a[0] <= 0:
            raise ValueError("real power of a jet needs a positive value")
        b = [mp.power(a[0], q)]
        for k in range(1, len(a)):
            s = sum(((q + 1) * j - k) * a[j] * b[k - j] for j in range(1, k + 1))
            b.append(s / (k * a[0]))
        return Jet(self.center, b)

    def abs_pow(self, p) -> "Jet":
        """``|f|**p``; the sign of ``f(center)`` is folded in before the power."""
        if self.coeffs[0] == 0:
            raise ValueError("|f|^p is not smooth at a zero of f")
        return (self if self.coeffs[0] > 0 else -self).pow(p)

    def sign(self) -> int:
        v = self.coeffs[0]
        return (v > 0) - (v < 0)

    def abs(self) -> "Jet":
        s = self.sign()
        if s == 0:
            raise ValueError("|f| is not smooth at a zero of f")
        return self if s > 0 else -self

    def log(self) -> "Jet":
        a = self.coeffs
        if a[0] <= 0:
            raise ValueError("log of a jet needs a positive value")
        b = [mp.log(a[0])]
        for k in range(1, len(a)):
            s = sum(j * b[j] * a[k - j] for j in range(1, k))
            b.append((a[k] - s / k) / a[0])
        return Jet(self.center, b)

    def exp(self) -> "Jet":
        a = self.coeffs
        b = [mp.exp(a[0])]
        for k in range(1, len(a)):
            b.append(sum(j * a[j] * b[k - j] for j in range(1, k + 1)) / k)
        return Jet(self.center, b)

    def compose(self, inner: "Jet") -> "Jet":
        """``self(inner)`` where ``inner.value`` is this jet's centre.

        ``self`` holds the Taylor coefficients of ``f`` at ``inner.value``;
        the result is the jet of ``f(g(x))`` at ``inner.center``.
        """
        delta = inner - inner.value
        out = Jet.constant(self.coeffs[-1], inner.center, inner.order)
        for c in reversed(self.coeffs[:-1]):
            out = out * delta + c
        return out

    def __call__(self, x):
        """Evaluate the Taylor polynomial at ``x``."""
        h = x - self.center
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * h + c
        return acc


def jet_arith(a: Jet, b, op: str) -> Jet:
    """Binary jet arithmetic by name: ``add``, ``sub``, ``mul`` or ``div``."""
    if isinstance(b, Jet) and a.center != b.center:
        raise ValueError("jets expanded at different centres")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown jet operation {op!r}")


def jet_fn(a: Jet, fn: str, q=None) -> Jet:
    """Unary jet function by name: ``log``, ``exp``, ``pow`` (needs ``q``) or ``abs_pow``."""
    if fn == "log":
        return a.log()
    if fn == "exp":
        return a.exp()
    if fn == "pow":
        return a.pow(q)
    if fn == "abs_pow":
        return a.abs_pow(q)
    raise ValueError(f"unknown jet function {fn!r}")


def poly_jet(roots: Sequence, s, order: int, one=1) -> Jet:
    """Jet at ``s`` of ``prod(x - root)`` built from linear-factor jets."""
    x = Jet.variable(s, order, one)
    out = Jet.constant(one, s, order)
    for r in roots:
        out = out * (x - r)
    return out
