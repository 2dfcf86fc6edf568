"""Small numeric conversions shared by the modules."""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp


def to_mpf(x):
    """``mpmath.mpf`` from int, float, str, Fraction or mpf."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def is_int(x) -> bool:
    try:
        return x == int(x)
    except (TypeError, ValueError, OverflowError):
        return False
