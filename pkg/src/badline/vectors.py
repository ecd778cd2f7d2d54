"""Exact 3-vectors over the integers and rationals.

Integer vectors are written (x0, x1, x2); in approximation problems x0
plays the role of the denominator and (x1, x2) of the numerators.  All
norms are kept squared so everything stays in Z or Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotABasis, NotPrimitivePair, ZeroVector


@dataclass(frozen=True)
class IVec3:
    """Integer vector in Z^3."""

    x0: int
    x1: int
    x2: int

    def __post_init__(self) -> None:
        for c in (self.x0, self.x1, self.x2):
            if not isinstance(c, int):
                raise TypeError(f"integer coordinate expected, got {type(c).__name__}")

    def __add__(self, other: "IVec3") -> "IVec3":
        return IVec3(self.x0 + other.x0, self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "IVec3") -> "IVec3":
        return IVec3(self.x0 - other.x0, self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> "IVec3":
        return IVec3(-self.x0, -self.x1, -self.x2)

    def scale(self, k: int) -> "IVec3":
        return IVec3(k * self.x0, k * self.x1, k * self.x2)

    def coords(self) -> tuple[int, int, int]:
        return (self.x0, self.x1, self.x2)

    def is_zero(self) -> bool:
        return self.x0 == 0 and self.x1 == 0 and self.x2 == 0

    def as_qvec(self) -> "QVec3":
        return QVec3(Fraction(self.x0), Fraction(self.x1), Fraction(self.x2))


@dataclass(frozen=True)
class QVec3:
    """Rational vector in Q^3."""

    x0: Fraction
    x1: Fraction
    x2: Fraction

    def __add__(self, other: "QVec3") -> "QVec3":
        return QVec3(self.x0 + other.x0, self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "QVec3") -> "QVec3":
        return QVec3(self.x0 - other.x0, self.x1 - other.x1, self.x2 - other.x2)

    def scale(self, k: Fraction | int) -> "QVec3":
        return QVec3(k * self.x0, k * self.x1, k * self.x2)

    def coords(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.x0, self.x1, self.x2)


def dot(a: IVec3, b: IVec3) -> int:
    return a.x0 * b.x0 + a.x1 * b.x1 + a.x2 * b.x2


def qdot(a: QVec3, b: QVec3) -> Fraction:
    return a.x0 * b.x0 + a.x1 * b.x1 + a.x2 * b.x2


def cross(a: IVec3, b: IVec3) -> IVec3:
    return IVec3(
        a.x1 * b.x2 - a.x2 * b.x1,
        a.x2 * b.x0 - a.x0 * b.x2,
        a.x0 * b.x1 - a.x1 * b.x0,
    )


def det3(a: IVec3, b: IVec3, c: IVec3) -> int:
    """Determinant of the 3x3 matrix with rows a, b, c."""
    return dot(a, cross(b, c))


def norm_sq(a: IVec3) -> int:
    return a.x0 * a.x0 + a.x1 * a.x1 + a.x2 * a.x2


def qnorm_sq(a: QVec3) -> Fraction:
    return a.x0 * a.x0 + a.x1 * a.x1 + a.x2 * a.x2


def norm_inf(a: IVec3) -> int:
    return max(abs(a.x0), abs(a.x1), abs(a.x2))


def cmp_norm(a: IVec3, b: IVec3) -> int:
    """-1, 0 or +1 according to |a| vs |b| (compared exactly, squared)."""
    na, nb = norm_sq(a), norm_sq(b)
    return (na > nb) - (na < nb)


def content(a: IVec3) -> int:
    """gcd of the coordinates; 0 only for the zero vector."""
    return math.gcd(a.x0, math.gcd(a.x1, a.x2))


def is_primitive(a: IVec3) -> bool:
    return content(a) == 1


def primitive_part(a: IVec3) -> IVec3:
    """a divided by its content."""
    g = content(a)
    if g == 0:
        raise ZeroVector("zero vector has no primitive part")
    return IVec3(a.x0 // g, a.x1 // g, a.x2 // g)


def _solve_unit_dot(n: IVec3) -> IVec3:
    """Some integer vector w with dot(w, n) == 1; n must be primitive."""
    g01, s, t = _ext_gcd(n.x0, n.x1)
    g, p, r = _ext_gcd(g01, n.x2)
    if g != 1:
        raise NotABasis("cross product is not primitive")
    # p*(s*n0 + t*n1) + r*n2 == 1
    return IVec3(p * s, p * t, r)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b == g == gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def complete_to_basis(u: IVec3, v: IVec3) -> IVec3:
    """Third basis vector w with det(w, u, v) == 1, reduced canonically.

    The solution set is a coset w0 + Zu + Zv; the representative returned
    is the one whose (u, v) expansion coefficients both lie in [0, 1).
    Expanding w = cu*u + cv*v + cn*n against the dual directions n x v and
    n x u gives cu = -dot(w, n x v) / |n|^2 and cv = dot(w, n x u) / |n|^2,
    and adding u or v shifts exactly one coefficient by 1.
    """
    n = cross(u, v)
    if n.is_zero():
        raise NotPrimitivePair("u and v are collinear")
    if content(n) != 1:
        raise NotPrimitivePair("u and v do not span a primitive plane lattice")
    w = _solve_unit_dot(n)
    d_sq = dot(n, n)
    cu_num = -dot(w, cross(n, v))
    w = w + u.scale(-(cu_num // d_sq))
    cv_num = dot(w, cross(n, u))
    w = w + v.scale(-(cv_num // d_sq))
    if det3(w, u, v) != 1:
        raise NotABasis("completion failed")
    return w


def level_index(w: IVec3, u: IVec3, v: IVec3) -> int:
    """Index of the plane parallel to span(u, v) that w lies in.

    Planes are numbered by dot(w, cross(u, v)); the lattice plane through
    the origin is level 0 and consecutive levels are at spacing
    1/|cross(u, v)|.
    """
    n = cross(u, v)
    if n.is_zero():
        raise NotPrimitivePair("u and v are collinear")
    if content(n) != 1:
        raise NotPrimitivePair("u and v do not span a primitive plane lattice")
    return dot(w, n)
