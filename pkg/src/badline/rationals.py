"""Exact rational helpers: rounding, distances to integers, square roots.

Everything here takes and returns ``fractions.Fraction`` (or plain ints) so
callers never touch floating point.  Square roots of rationals are returned
as directed rational bounds at a requested bit count.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import isqrt

from .errors import NegativeBound


def nearest_int(x: Fraction) -> int:
    """Integer nearest to x, halves rounding up (floor(x + 1/2))."""
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def dist_to_int(x: Fraction) -> Fraction:
    """Distance from x to the nearest integer, in [0, 1/2]."""
    return abs(x - nearest_int(x))


def dist_interval_to_int(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Range of dist_to_int over the interval [lo, hi].

    The minimum is 0 whenever the interval contains an integer; the maximum
    is 1/2 whenever it contains a half-integer.
    """
    if lo > hi:
        raise ValueError("empty interval")
    half = Fraction(1, 2)
    if hi - lo >= 1:
        return Fraction(0), half
    if math.floor(hi) >= math.ceil(lo):
        d_lo = Fraction(0)
    else:
        d_lo = min(dist_to_int(lo), dist_to_int(hi))
    # max is attained at an endpoint or a half-integer inside
    k = math.floor(2 * hi)
    if k % 2 == 0:
        k -= 1
    if Fraction(k, 2) >= lo:
        d_hi = half
    else:
        d_hi = max(dist_to_int(lo), dist_to_int(hi))
    return d_lo, d_hi


def cmp_sqrt(a_sq: Fraction | int, r: Fraction | int) -> int:
    """-1, 0 or +1 comparing sqrt(a_sq) against r, decided via squares."""
    if a_sq < 0:
        raise NegativeBound("squared quantity cannot be negative")
    if r < 0:
        return 1
    r_sq = Fraction(r) ** 2
    return (a_sq > r_sq) - (a_sq < r_sq)


def sqrt_lower(x: Fraction, bits: int) -> Fraction:
    """Rational lower bound for sqrt(x), error below 2**-bits * (1/den-ish).

    Uses integer isqrt on x scaled by 4**bits; exact when x is a perfect
    square of a dyadic-over-den rational.
    """
    if x < 0:
        raise NegativeBound("sqrt of negative rational")
    if bits < 0:
        raise NegativeBound("negative bit count")
    n, d = x.numerator, x.denominator
    r = isqrt(n * d << (2 * bits))
    return Fraction(r, d << bits)


def sqrt_upper(x: Fraction, bits: int) -> Fraction:
    """Rational upper bound for sqrt(x); equals sqrt_lower iff x is exact."""
    if x < 0:
        raise NegativeBound("sqrt of negative rational")
    if bits < 0:
        raise NegativeBound("negative bit count")
    n, d = x.numerator, x.denominator
    m = n * d << (2 * bits)
    r = isqrt(m)
    if r * r == m:
        return Fraction(r, d << bits)
    return Fraction(r + 1, d << bits)


def floor_log2(x: Fraction) -> int:
    """Largest k with 2**k <= x, for x > 0."""
    if x <= 0:
        raise NegativeBound("floor_log2 needs a positive value")
    n, d = x.numerator, x.denominator
    k = n.bit_length() - d.bit_length()
    if (n >> k if k >= 0 else n << -k) < d:
        k -= 1
    return k


def dyadic(k: int) -> Fraction:
    """The dyadic rational 2**k as a Fraction (k may be negative)."""
    if k >= 0:
        return Fraction(1 << k)
    return Fraction(1, 1 << -k)
