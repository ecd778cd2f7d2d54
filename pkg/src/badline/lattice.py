"""Two-dimensional lattices in rational planes of Z^3.

A plane lattice is spanned by an ordered pair (u, v) of integer vectors
whose cross product is primitive, so the lattice is all of Z^3 on its
plane.  The second vector v doubles as the distinguished axis of the
in-plane frame; parallel copies of the plane are indexed by a completing
vector zp with det(zp, u, v) = +-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import Infeasible, NotABasis, NotPrimitivePair, OffPlane, PrecisionExhausted
from .oracles import PRECISION_START, Interval, RealOracle, precision_cap, precision_ladder
from .rationals import nearest_int
from .vectors import IVec3, QVec3, _ext_gcd, content, cross, det3, dot, norm_sq, qdot

RealVec3Oracle = tuple[RealOracle, RealOracle, RealOracle]


def mixed_dot(a: QVec3, b: IVec3) -> Fraction:
    return a.x0 * b.x0 + a.x1 * b.x1 + a.x2 * b.x2


@dataclass(frozen=True)
class PlaneLattice:
    """Rank-2 sublattice of Z^3 spanning a rational plane through 0."""

    u: IVec3
    v: IVec3

    def __post_init__(self) -> None:
        n = cross(self.u, self.v)
        if n.is_zero():
            raise NotPrimitivePair("spanning vectors are collinear")
        if content(n) != 1:
            raise NotPrimitivePair("spanning pair misses lattice points of its plane")

    @property
    def normal(self) -> IVec3:
        return cross(self.u, self.v)

    @property
    def d_sq(self) -> int:
        """Squared covolume; also the squared normal length."""
        return norm_sq(self.normal)

    @property
    def level_spacing_sq(self) -> Fraction:
        """Squared distance between consecutive parallel lattice planes."""
        return Fraction(1, self.d_sq)

    def contains(self, w: IVec3) -> bool:
        return dot(w, self.normal) == 0

    def check_completion(self, zp: IVec3) -> int:
        """Return det(zp, u, v), which must be +-1 for a valid completion."""
        sigma = det3(zp, self.u, self.v)
        if sigma not in (1, -1):
            raise NotABasis(f"completion has determinant {sigma}, need +-1")
        return sigma

    def point(self, zp: IVec3, level: int, m: int, n: int) -> IVec3:
        """The lattice point level*zp + m*u + n*v."""
        return zp.scale(level) + self.u.scale(m) + self.v.scale(n)

    def level_of(self, zp: IVec3, w: IVec3) -> int:
        """Which parallel plane w lies on, counted so that zp is level 1.

        dot(zp, normal) = det(zp, u, v) = +-1, so consecutive planes step
        the normal dot product by exactly one.
        """
        sigma = self.check_completion(zp)
        return sigma * dot(w, self.normal)


@dataclass(frozen=True)
class Frame:
    """In-plane coordinates: t along v, s along e = normal x v.

    The frame is anchored at a rational point; t and s are offsets in
    units of actual length divided by |v| resp. |e|, so a lattice step of
    v changes t by 1 and a step of u changes s by -1/|v|^2 while fixing t
    up to its own t-shift.  The identities dot(u, e) = -d_sq and
    dot(v, e) = 0 make both coordinates exact rationals.
    """

    lattice: PlaneLattice

    @property
    def z(self) -> IVec3:
        return self.lattice.v

    @property
    def e(self) -> IVec3:
        return cross(self.lattice.normal, self.lattice.v)

    @property
    def z_normsq(self) -> int:
        return norm_sq(self.z)

    @property
    def e_normsq(self) -> int:
        return self.lattice.d_sq * self.z_normsq

    def t_of(self, w: QVec3, anchor: QVec3) -> Fraction:
        return qdot(w - anchor, self.z.as_qvec()) / self.z_normsq

    def s_of(self, w: QVec3, anchor: QVec3) -> Fraction:
        return qdot(w - anchor, self.e.as_qvec()) / self.e_normsq


@dataclass(frozen=True)
class LevelRect:
    """Axis-aligned frame rectangle on one lattice plane.

    Bounds are inclusive; t runs along the frame z-axis and s along the
    e-axis, both relative to the anchor point.
    """

    anchor: QVec3
    t_lo: Fraction
    t_hi: Fraction
    s_lo: Fraction
    s_hi: Fraction
    level: int

    def __post_init__(self) -> None:
        if self.t_lo > self.t_hi:
            raise ValueError("empty t range")
        if self.s_lo > self.s_hi:
            raise ValueError("empty s range")


def feasible_rows(
    lattice: PlaneLattice, zp: IVec3, rect: LevelRect
) -> Iterator[tuple[int, int, int]]:
    """Yield (m, n_lo, n_hi) for every nonempty lattice row inside rect.

    Rows are indexed by the coefficient m of u (ascending); within a row
    the points level*zp + m*u + n*v have n in [n_lo, n_hi].  A step of u
    moves s by exactly -1/|v|^2, so the s-bounds pin down the m range and
    the t-bounds then pin down n for each m.
    """
    lattice.check_completion(zp)
    frame = Frame(lattice)
    z_sq = frame.z_normsq
    base = zp.scale(rect.level)
    s_base = (dot(base, frame.e) - mixed_dot(rect.anchor, frame.e)) / Fraction(
        frame.e_normsq
    )
    t_base = (dot(base, frame.z) - mixed_dot(rect.anchor, frame.z)) / Fraction(z_sq)
    du = Fraction(dot(lattice.u, frame.z), z_sq)
    m_lo = math.ceil((s_base - rect.s_hi) * z_sq)
    m_hi = math.floor((s_base - rect.s_lo) * z_sq)
    for m in range(m_lo, m_hi + 1):
        t0 = t_base + m * du
        n_lo = math.ceil(rect.t_lo - t0)
        n_hi = math.floor(rect.t_hi - t0)
        if n_lo <= n_hi:
            yield m, n_lo, n_hi


def find_point_in_level_rect(lattice: PlaneLattice, zp: IVec3, rect: LevelRect) -> IVec3:
    """First lattice point inside rect, scanning rows by ascending m.

    Deterministic tie-break: smallest m, then smallest n.  Raises
    Infeasible when the rectangle holds no lattice point of that level.
    """
    for m, n_lo, _ in feasible_rows(lattice, zp, rect):
        return lattice.point(zp, rect.level, m, n_lo)
    raise Infeasible("no lattice point in rectangle")


def make_frame(u_prev: IVec3, z: IVec3) -> tuple[PlaneLattice, Frame]:
    """Lattice spanned by (u_prev, z) together with its in-plane frame.

    The frame's primary axis is z = lattice.v; the squared transverse
    spacing is lattice.d_sq / frame.z_normsq.
    """
    lattice = PlaneLattice(u_prev, z)
    return lattice, Frame(lattice)


def rect_coords(frame: Frame, anchor: QVec3, p: QVec3) -> tuple[Fraction, Fraction]:
    """Frame coordinates (t, s) of p, so p = anchor + t*z + s*e exactly."""
    offset = p - anchor
    if qdot(offset, frame.lattice.normal.as_qvec()) != 0:
        raise OffPlane("point is outside the frame plane")
    return frame.t_of(p, anchor), frame.s_of(p, anchor)


def gauss_reduce(lattice: PlaneLattice) -> PlaneLattice:
    """Lagrange-reduced basis of the same lattice.

    Afterwards |u| <= |v| and |(u, v)| <= |u|^2 / 2, so the basis is as
    orthogonal as the lattice allows; the covolume is untouched.
    """
    u, v = lattice.u, lattice.v
    if norm_sq(u) > norm_sq(v):
        u, v = v, u
    while True:
        v = v - u.scale(nearest_int(Fraction(dot(u, v), norm_sq(u))))
        if norm_sq(v) >= norm_sq(u):
            return PlaneLattice(u, v)
        u, v = v, u


def _dir_enclosure(dir: RealVec3Oracle, bits: int) -> tuple[Interval, Interval, Interval]:
    return (dir[0].bounds(bits), dir[1].bounds(bits), dir[2].bounds(bits))


def _div_pos(num: Interval, den: Interval) -> Interval:
    """num / den for a denominator interval strictly above zero."""
    if den.lo <= 0:
        raise ValueError("denominator interval must be positive")
    lo = num.lo / (den.hi if num.lo >= 0 else den.lo)
    hi = num.hi / (den.lo if num.hi >= 0 else den.hi)
    return Interval(lo, hi)


def _ray_dot(enc: tuple[Interval, Interval, Interval], w: IVec3) -> Interval:
    return enc[0] * w.x0 + enc[1] * w.x1 + enc[2] * w.x2


def _ray_dist_sq(enc: tuple[Interval, Interval, Interval], w: IVec3) -> Interval:
    """Enclosure of dist(w, R*dir)^2 = |w|^2 - (w, dir)^2 / |dir|^2."""
    norm = enc[0].sq() + enc[1].sq() + enc[2].sq()
    proj = _div_pos(_ray_dot(enc, w).sq(), norm)
    raw = Interval.exact(norm_sq(w)) - proj
    return Interval(max(raw.lo, Fraction(0)), max(raw.hi, Fraction(0)))


def ray_dist_sq(dir: RealVec3Oracle, w: IVec3, bits: int) -> Interval:
    """Certified enclosure of the squared distance from w to the dir ray."""
    return _ray_dist_sq(_dir_enclosure(dir, bits), w)


def _height_family(lattice: PlaneLattice, height: int) -> Optional[tuple[IVec3, IVec3]]:
    """Base point and step of the lattice points with first coordinate height."""
    a0, b0 = lattice.u.x0, lattice.v.x0
    if a0 == 0 and b0 == 0:
        return None
    g, s, t = _ext_gcd(a0, b0)
    if height % g:
        return None
    k = height // g
    base = lattice.u.scale(s * k) + lattice.v.scale(t * k)
    step = lattice.u.scale(b0 // g) - lattice.v.scale(a0 // g)
    return base, step

# widest candidate scan tolerated before asking for more precision instead
_SCAN_CAP = 64


def _closest_in_family(
    enc: tuple[Interval, Interval, Interval], base: IVec3, step: IVec3, bits: int
) -> Optional[tuple[IVec3, Interval]]:
    """Member of base + Z*step provably closest to the dir ray, or None.

    The squared distance is a convex quadratic in the step count, so only
    the integer neighbours of the enclosed real minimizer need comparing.
    Returns None when the enclosures cannot single out a minimum (exact
    ties keep the smallest step count); the caller then retries with more
    bits.
    """
    norm = enc[0].sq() + enc[1].sq() + enc[2].sq()
    dot_base = _ray_dot(enc, base)
    dot_step = _ray_dot(enc, step)
    # real minimizer: k* = (proj_bs - (base, step)) / (|step|^2 - proj_ss)
    proj_bs = _div_pos(dot_base * dot_step, norm)
    proj_ss = _div_pos(dot_step.sq(), norm)
    den = Interval.exact(norm_sq(step)) - proj_ss
    if den.lo <= 0:
        return None
    k_star = _div_pos(proj_bs - dot(base, step), den)
    lo = math.floor(k_star.lo) - 1
    hi = math.ceil(k_star.hi) + 1
    if hi - lo > _SCAN_CAP:
        return None
    best: Optional[tuple[IVec3, Interval]] = None
    for k in range(lo, hi + 1):
        cand = base + step.scale(k)
        d = _ray_dist_sq(enc, cand)
        if best is None or d.hi < best[1].lo:
            best = (cand, d)
        elif d.lo > best[1].hi:
            continue
        elif d.is_point() and best[1].is_point() and d.lo == best[1].lo:
            continue
        else:
            return None
    return best


def best_approximations(lattice: PlaneLattice, dir: RealVec3Oracle, q_max: int) -> list[IVec3]:
    """Lattice points realizing record distances to the dir ray.

    Scans first coordinates 1..q_max; a point enters the list when no
    lattice point of smaller or equal height sits provably closer to the
    ray.  Exact distance ties are all kept, in height order.  Comparisons
    run at escalating precision and raise PrecisionExhausted when the
    oracle cannot separate two candidates below the cap.
    """
    if q_max < 1:
        raise ValueError("height bound must be at least 1")
    normal_dot = _ray_dot(_dir_enclosure(dir, PRECISION_START), lattice.normal)
    if not normal_dot.contains(0):
        raise OffPlane("direction oracle leaves the lattice plane")
    records: list[IVec3] = []
    best_so_far: Optional[IVec3] = None
    for height in range(1, q_max + 1):
        family = _height_family(lattice, height)
        if family is None:
            continue
        for bits in precision_ladder():
            enc = _dir_enclosure(dir, bits)
            picked = _closest_in_family(enc, family[0], family[1], bits)
            if picked is None:
                continue
            cand, d_cand = picked
            if best_so_far is None:
                records.append(cand)
                best_so_far = cand
                break
            d_best = _ray_dist_sq(enc, best_so_far)
            if d_cand.hi < d_best.lo:
                records.append(cand)
                best_so_far = cand
                break
            if d_cand.is_point() and d_best.is_point() and d_cand.lo == d_best.lo:
                # equal-distance record: keep both, the later height last
                records.append(cand)
                best_so_far = cand
                break
            if d_cand.lo > d_best.hi:
                break
        else:
            raise PrecisionExhausted(
                f"distance comparison at height {height} undecided at {precision_cap()} bits"
            )
    return records
