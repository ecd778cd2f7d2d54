"""Inhomogeneous approximation when theta satisfies one integer relation.

Given a primitive integer vector z with (z, theta_bar) = 0, the lattice
points orthogonal to z form a rank-2 lattice of determinant |z|.  Best
approximations to the theta ray inside that lattice yield, for every
point eta of the corresponding rational line, integer witnesses x with
x * max_i dist(theta_i x - eta_i, Z) bounded by a constant multiple of
|z|.  The rational-theta gap bound covers the fully degenerate case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import Infeasible, NotPrimitive, OffLine, ZeroVector
from .lattice import LevelRect, PlaneLattice, RealVec3Oracle, find_point_in_level_rect, mixed_dot
from .lattice import best_approximations as lattice_best_approximations
from .lattice import ray_dist_sq as lattice_ray_dist_sq
from .oracles import AffineOracle, Interval, RationalOracle, RealOracle, precision_ladder
from .rationals import dist_interval_to_int, dist_to_int, sqrt_upper
from .vectors import IVec3, QVec3, _ext_gcd, complete_to_basis, content, cross, norm_sq
from .verify import QVec2, WitnessReport

_ORACLE_BITS = 128
_HEIGHT_START = 128
_HEIGHT_CAP = 1 << 24


def kernel_lattice(z: IVec3) -> PlaneLattice:
    """Basis of the integer points orthogonal to z; cross(u, v) = -z.

    z must be primitive, otherwise its orthogonal plane holds integer
    points the returned pair cannot reach.
    """
    if z.is_zero():
        raise ZeroVector("kernel of the zero vector is not a plane")
    if content(z) != 1:
        raise NotPrimitive(f"relation {z} has content {content(z)}")
    if z.x1 == 0 and z.x2 == 0:
        u = IVec3(0, 1, 0) if z.x0 > 0 else IVec3(0, 0, 1)
        v = IVec3(0, 0, 1) if z.x0 > 0 else IVec3(0, 1, 0)
        return PlaneLattice(u, v)
    g, s, t = _ext_gcd(z.x1, z.x2)
    u = IVec3(0, z.x2 // g, -z.x1 // g)
    v = IVec3(g, -z.x0 * s, -z.x0 * t)
    lattice = PlaneLattice(u, v)
    assert cross(u, v) == -z or cross(u, v) == z
    return lattice


@dataclass(frozen=True)
class DependentInstance:
    """A relation z together with interval oracles for both coordinates.

    theta1 is the free coordinate's oracle: it stands for theta_1 when
    z2 != 0 (then theta_2 = -(z0 + z1 theta_1)/z2 is derived), and for
    theta_2 in the degenerate case z2 = 0 (then theta_1 = -z0/z1 is
    rational and forced).
    """

    relation: IVec3
    theta1: RealOracle

    def __post_init__(self) -> None:
        if self.relation.x1 == 0 and self.relation.x2 == 0:
            raise ValueError("relation fixes the unit coordinate, no theta exists")
        if content(self.relation) != 1:
            raise NotPrimitive(f"relation {self.relation} is not primitive")

    @property
    def lattice(self) -> PlaneLattice:
        return kernel_lattice(self.relation)

    @property
    def d_sq(self) -> int:
        return norm_sq(self.relation)

    @property
    def theta(self) -> RealVec3Oracle:
        """Oracle triple for theta_bar = (1, theta_1, theta_2)."""
        z = self.relation
        if z.x2 != 0:
            derived = AffineOracle(Fraction(-z.x0, z.x2), Fraction(-z.x1, z.x2), self.theta1)
            return (RationalOracle(Fraction(1)), self.theta1, derived)
        forced = RationalOracle(Fraction(-z.x0, z.x1))
        return (RationalOracle(Fraction(1)), forced, self.theta1)

    def theta_bounds(self, bits: int) -> tuple[Interval, Interval]:
        """Enclosures of (theta_1, theta_2) at the given precision."""
        _, t1, t2 = self.theta
        return t1.bounds(bits), t2.bounds(bits)


def ray_dist_sq(inst: DependentInstance, g: IVec3, bits: int) -> Interval:
    """Enclosure of dist(g, theta ray)^2 = |g|^2 - (g, theta_bar)^2 / |theta_bar|^2."""
    return lattice_ray_dist_sq(inst.theta, g, bits)


def best_approximations(inst: DependentInstance, max_height: int) -> list[IVec3]:
    """Kernel-lattice points realizing record distances to the theta ray.

    Delegates to the plane-lattice search with the instance's theta_bar
    oracle as the ray direction; heights are the first coordinates
    1..max_height.
    """
    return lattice_best_approximations(inst.lattice, inst.theta, max_height)


def witness_error_interval(
    inst: DependentInstance, eta: QVec2, x: int, y: IVec3, bits: int
) -> tuple[Fraction, Fraction]:
    """Certified [lo, hi] of max_i dist(theta_i x - eta_i - y_i, Z)."""
    t1, t2 = inst.theta_bounds(bits)
    his = []
    los = []
    for theta_i, eta_i, y_i in ((t1, eta[0], y.x1), (t2, eta[1], y.x2)):
        c = theta_i * x - eta_i - y_i
        d_lo, d_hi = dist_interval_to_int(c.lo, c.hi)
        los.append(d_lo)
        his.append(d_hi)
    return max(los), max(his)


def chebyshev_witnesses(
    inst: DependentInstance, eta: QVec2, nu_max: int
) -> list[WitnessReport]:
    """Inhomogeneous witnesses from consecutive best approximations.

    For each stage nu >= 2 a rectangle spanning one g_nu-period with
    transverse half-width dist(g_{nu-1}, ray) is anchored at
    eta_bar = (1, -eta1, -eta2); the lattice point found there gives a
    witness x in [1, 1 + q_nu] whose scaled error x * err_hi the report
    checks against 4 * |z|.
    """
    if nu_max < 2:
        raise ValueError("need nu_max >= 2 for a previous best approximation")
    z = inst.relation
    eta_bar = QVec3(Fraction(1), -eta[0], -eta[1])
    if mixed_dot(eta_bar, z) != 0:
        raise OffLine(f"eta_bar is not orthogonal to {z}")
    height_cap = _HEIGHT_START
    approx = best_approximations(inst, height_cap)
    while len(approx) < nu_max:
        height_cap *= 4
        if height_cap > _HEIGHT_CAP:
            raise Infeasible(f"fewer than {nu_max} best approximations below {_HEIGHT_CAP}")
        approx = best_approximations(inst, height_cap)
    d_hi = sqrt_upper(Fraction(inst.d_sq), _ORACLE_BITS)
    reports: list[WitnessReport] = []
    for nu in range(2, nu_max + 1):
        g_prev, g_nu = approx[nu - 2], approx[nu - 1]
        lattice = PlaneLattice(g_prev, g_nu)
        zp = complete_to_basis(g_prev, g_nu)
        e_normsq = norm_sq(cross(lattice.normal, g_nu))
        report: WitnessReport | None = None
        for bits in precision_ladder():
            r_sq_hi = ray_dist_sq(inst, g_prev, bits).hi
            s_half = sqrt_upper(r_sq_hi / e_normsq, bits)
            rect = LevelRect(
                anchor=eta_bar,
                t_lo=Fraction(0),
                t_hi=Fraction(1),
                s_lo=-s_half,
                s_hi=s_half,
                level=0,
            )
            try:
                y = find_point_in_level_rect(lattice, zp, rect)
            except Infeasible:
                # the enclosure-tightened rectangle can lose the point the
                # true-width rectangle still holds; keep the last report
                if report is None:
                    raise
                break
            x = y.x0 - 1
            while x < 1:
                y = y + g_nu
                x = y.x0 - 1
            err_lo, err_hi = witness_error_interval(inst, eta, x, y, bits)
            bound = 4 * d_hi / x
            report = WitnessReport(
                eta=eta,
                nu=nu,
                eta_line=eta,
                y=y,
                x=x,
                err_hi=err_hi,
                err_lo=err_lo,
                bound=bound,
                passed=err_hi <= bound,
                nonzero_certified=err_lo > 0,
            )
            if report.passed:
                break
        assert report is not None
        reports.append(report)
    return reports


def rational_theta_gap(theta: QVec2, eta: QVec2) -> Fraction:
    """dist_inf(eta, (1/q) Z^2) for the common denominator q of theta.

    Every orbit point x*theta mod 1 lies on the (1/q)-grid, so this gap
    is a lower bound for inf_x max_i dist(x theta_i - eta_i, Z); it is
    positive exactly when eta is off the grid.
    """
    q = math.lcm(theta[0].denominator, theta[1].denominator)
    return max(dist_to_int(q * eta[0]), dist_to_int(q * eta[1])) / q


def pell_instance() -> DependentInstance:
    """The quadratic example: relation (-1, 1, 1) with theta_1 = sqrt(2) - 1."""
    from .oracles import AffineOracle, SqrtOracle

    theta1 = AffineOracle(Fraction(-1), Fraction(1), SqrtOracle(Fraction(2)))
    return DependentInstance(IVec3(-1, 1, 1), theta1)
