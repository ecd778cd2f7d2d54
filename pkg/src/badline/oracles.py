"""Directed rational enclosures for real numbers.

A real oracle hands out a rational interval guaranteed to contain its
value, tightening as the requested bit count grows.  Comparisons against
rationals are decided by refining until the interval separates from the
target, doubling precision up to a cap (settable through the
BADLINE_PRECISION_CAP environment variable).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Protocol

from .errors import PrecisionExhausted
from .rationals import sqrt_lower, sqrt_upper

PRECISION_START = 64
_PRECISION_CAP_DEFAULT = 4096


def precision_cap() -> int:
    raw = os.environ.get("BADLINE_PRECISION_CAP")
    if raw is None:
        return _PRECISION_CAP_DEFAULT
    cap = int(raw)
    if cap < PRECISION_START:
        raise ValueError("precision cap below the starting precision")
    return cap


def precision_ladder() -> Iterator[int]:
    """Yield 64, 128, ... up to the cap (inclusive)."""
    cap = precision_cap()
    bits = PRECISION_START
    while bits <= cap:
        yield bits
        bits *= 2


@dataclass(frozen=True)
class Interval:
    """Closed rational interval [lo, hi] containing some real value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    @staticmethod
    def exact(x: Fraction | int) -> "Interval":
        f = Fraction(x)
        return Interval(f, f)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other: "Interval | Fraction | int") -> "Interval":
        other = _coerce(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other: "Interval | Fraction | int") -> "Interval":
        other = _coerce(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other: "Interval | Fraction | int") -> "Interval":
        return _coerce(other) - self

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval | Fraction | int") -> "Interval":
        other = _coerce(other)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def sq(self) -> "Interval":
        """Interval of x*x; tighter than self*self when 0 is inside."""
        if self.lo >= 0:
            return Interval(self.lo * self.lo, self.hi * self.hi)
        if self.hi <= 0:
            return Interval(self.hi * self.hi, self.lo * self.lo)
        return Interval(Fraction(0), max(self.lo * self.lo, self.hi * self.hi))

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return Interval(-self.hi, -self.lo)
        return Interval(Fraction(0), max(-self.lo, self.hi))

    def contains(self, x: Fraction | int) -> bool:
        return self.lo <= x <= self.hi

    def cmp(self, x: Fraction | int) -> Optional[int]:
        """-1/0/+1 against a rational, or None if x sits strictly inside."""
        if self.hi < x:
            return -1
        if self.lo > x:
            return 1
        if self.lo == x == self.hi:
            return 0
        return None


def _coerce(x: "Interval | Fraction | int") -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.exact(x)


class RealOracle(Protocol):
    """A real number queryable for rational enclosures."""

    def bounds(self, bits: int) -> Interval:
        """Enclosure whose width shrinks as bits grows."""
        ...


@dataclass(frozen=True)
class RationalOracle:
    value: Fraction

    def bounds(self, bits: int) -> Interval:
        return Interval.exact(self.value)


@dataclass(frozen=True)
class SqrtOracle:
    """sqrt(radicand) for a nonnegative rational radicand."""

    radicand: Fraction

    def bounds(self, bits: int) -> Interval:
        return Interval(sqrt_lower(self.radicand, bits), sqrt_upper(self.radicand, bits))


@dataclass(frozen=True)
class AffineOracle:
    """offset + slope * inner, for rational offset and slope."""

    offset: Fraction
    slope: Fraction
    inner: RealOracle

    def bounds(self, bits: int) -> Interval:
        return self.inner.bounds(bits) * self.slope + self.offset


def resolve_sign(measure: Callable[[int], Optional[int]]) -> int:
    """Run measure over the precision ladder until it returns a sign.

    measure(bits) reports -1/0/+1 once decided and None while ambiguous.
    Raises PrecisionExhausted if the cap is reached undecided.
    """
    for bits in precision_ladder():
        sign = measure(bits)
        if sign is not None:
            return sign
    raise PrecisionExhausted(f"comparison undecided at {precision_cap()} bits")
