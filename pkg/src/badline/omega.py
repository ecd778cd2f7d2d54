"""Slowly growing weight functions with certified rational enclosures.

Three presets are provided: log (1 + ln(1 + t)), loglog
(1 + ln(1 + ln(1 + t))) and pow:EPS ((1 + t)**EPS for rational
0 < EPS <= 1/4).  Values are transcendental in general, so every query
returns a rational interval computed with MPFR directed rounding; each
preset is a composition of operations monotone on [0, oo), which makes
rounding every step down (resp. up) a valid lower (resp. upper) bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Protocol

import gmpy2

from .errors import NegativeBound
from .oracles import Interval, resolve_sign


class Omega(Protocol):
    """Weight function on [0, oo), queryable for rational enclosures."""

    @property
    def label(self) -> str: ...

    def enclosure(self, t: Fraction, bits: int) -> Interval:
        """Rational interval containing omega(t), width shrinking in bits."""
        ...


def _check_domain(t: Fraction) -> None:
    if t < 0:
        raise NegativeBound(f"weight function evaluated at negative argument {t}")


def _to_fraction(x: "gmpy2.mpfr") -> Fraction:
    return Fraction(*x.as_integer_ratio())


@dataclass(frozen=True)
class LogOmega:
    label: str = "log"

    def enclosure(self, t: Fraction, bits: int) -> Interval:
        _check_domain(t)
        q = gmpy2.mpq(t.numerator, t.denominator)
        with gmpy2.context(precision=bits, round=gmpy2.RoundDown):
            lo = 1 + gmpy2.log1p(gmpy2.mpfr(q))
        with gmpy2.context(precision=bits, round=gmpy2.RoundUp):
            hi = 1 + gmpy2.log1p(gmpy2.mpfr(q))
        return Interval(_to_fraction(lo), _to_fraction(hi))


@dataclass(frozen=True)
class LogLogOmega:
    label: str = "loglog"

    def enclosure(self, t: Fraction, bits: int) -> Interval:
        _check_domain(t)
        q = gmpy2.mpq(t.numerator, t.denominator)
        with gmpy2.context(precision=bits, round=gmpy2.RoundDown):
            lo = 1 + gmpy2.log1p(gmpy2.log1p(gmpy2.mpfr(q)))
        with gmpy2.context(precision=bits, round=gmpy2.RoundUp):
            hi = 1 + gmpy2.log1p(gmpy2.log1p(gmpy2.mpfr(q)))
        return Interval(_to_fraction(lo), _to_fraction(hi))


@dataclass(frozen=True)
class PowOmega:
    """(1 + t)**eps for a fixed rational exponent in (0, 1/4]."""

    eps: Fraction

    def __post_init__(self) -> None:
        if not 0 < self.eps <= Fraction(1, 4):
            raise ValueError(f"exponent must be in (0, 1/4], got {self.eps}")

    @property
    def label(self) -> str:
        return f"pow:{self.eps}"

    def enclosure(self, t: Fraction, bits: int) -> Interval:
        _check_domain(t)
        q = gmpy2.mpq(t.numerator, t.denominator)
        e = gmpy2.mpq(self.eps.numerator, self.eps.denominator)
        # exp(eps * log1p(t)); every factor is >= 0 and each op is monotone
        with gmpy2.context(precision=bits, round=gmpy2.RoundDown):
            lo = gmpy2.exp(gmpy2.mpfr(e) * gmpy2.log1p(gmpy2.mpfr(q)))
        with gmpy2.context(precision=bits, round=gmpy2.RoundUp):
            hi = gmpy2.exp(gmpy2.mpfr(e) * gmpy2.log1p(gmpy2.mpfr(q)))
        return Interval(_to_fraction(lo), _to_fraction(hi))


def parse_omega(spec: str) -> Omega:
    """Build a weight function from its label ("log", "loglog", "pow:EPS")."""
    if spec == "log":
        return LogOmega()
    if spec == "loglog":
        return LogLogOmega()
    if spec.startswith("pow:"):
        return PowOmega(Fraction(spec[len("pow:"):]))
    raise ValueError(f"unknown weight function {spec!r}")


def cmp_value(omega: Omega, t: Fraction | int, value: Fraction | int) -> int:
    """Sign of value - omega(t), refining precision until decided."""
    t = Fraction(t)
    value = Fraction(value)

    def measure(bits: int) -> Optional[int]:
        c = omega.enclosure(t, bits).cmp(value)
        return None if c is None else -c

    return resolve_sign(measure)


def cmp_sq_value(omega: Omega, t: Fraction | int, value_sq: Fraction | int) -> int:
    """Sign of value_sq - omega(t)**2, for comparing squared magnitudes."""
    t = Fraction(t)
    value_sq = Fraction(value_sq)

    def measure(bits: int) -> Optional[int]:
        c = omega.enclosure(t, bits).sq().cmp(value_sq)
        return None if c is None else -c

    return resolve_sign(measure)
