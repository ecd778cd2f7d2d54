"""Posterior checks for finished traces: line segments, witnesses, reports.

A finished trace pins down theta_M = theta(tip) together with a tail
radius, and its last plane pins down a line in the theta-plane.  This
module builds rational sample points on that line, hunts for the integer
witnesses that show each sample is well approximable relative to the
omega gauge, and emits diagnostic reports for the whole trace.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .construct import StepRecord, Trace, theta_of, theta_with_tail
from .errors import ConeViolation, Infeasible, NotABasis, OffLine
from .lattice import Frame, LevelRect, PlaneLattice, find_point_in_level_rect
from .oracles import PrecisionExhausted
from .rationals import dist_interval_to_int, sqrt_lower, sqrt_upper
from .vectors import IVec3, QVec3, cross, dot, qnorm_sq

_BOUND_BITS = 64

QVec2 = tuple[Fraction, Fraction]


def line_value(normal: IVec3, point: QVec2) -> Fraction:
    """Evaluate n0 - n1*x1 - n2*x2 at the point; zero means on the line."""
    return normal.x0 - normal.x1 * point[0] - normal.x2 * point[1]


def project_to_line(normal: IVec3, point: QVec2) -> QVec2:
    """Orthogonal projection of the point onto the line of line_value."""
    n_sq = normal.x1 * normal.x1 + normal.x2 * normal.x2
    if n_sq == 0:
        raise OffLine("normal has no in-plane part, line is undefined")
    t = Fraction(line_value(normal, point), n_sq)
    return (point[0] + t * normal.x1, point[1] + t * normal.x2)


@dataclass(frozen=True)
class SegmentSpec:
    """A rational segment on the final line, inside the unit ball at theta_M.

    center is the orthogonal projection of theta_M onto the line with
    normal coefficients, so dist_sq = |center - theta_M|^2 must be < 1
    for the segment to exist.  direction spans the line and half is a
    certified lower bound on the largest parameter magnitude that stays
    inside the ball, shrunk by 15/16 for slack.
    """

    normal: IVec3
    center: QVec2
    dist_sq: Fraction
    direction: tuple[int, int]
    half: Fraction

    def point_at(self, t: Fraction) -> QVec2:
        return (
            self.center[0] + t * self.direction[0],
            self.center[1] + t * self.direction[1],
        )


def segment_spec(trace: Trace) -> SegmentSpec:
    """Build the sampling segment for the last line of the trace."""
    prev, tip = trace.pair()
    normal = cross(prev, tip)
    theta = theta_of(tip)
    center = project_to_line(normal, theta)
    dx = center[0] - theta[0]
    dy = center[1] - theta[1]
    dist_sq = dx * dx + dy * dy
    if dist_sq >= 1:
        raise Infeasible("line misses the open unit ball at theta_M")
    direction = (normal.x2, -normal.x1)
    dir_sq = direction[0] * direction[0] + direction[1] * direction[1]
    half = Fraction(15, 16) * sqrt_lower(Fraction(1 - dist_sq, dir_sq), _BOUND_BITS)
    return SegmentSpec(
        normal=normal, center=center, dist_sq=dist_sq, direction=direction, half=half
    )


def segment_samples(trace: Trace, count: int) -> list[QVec2]:
    """count rational points on the last line, all within distance 1 of theta_M.

    The points sit at evenly spaced interior parameters of the segment, so
    count=1 yields exactly the center.  Each point is checked exactly
    against the line equation and the unit ball before it is returned.
    """
    if count < 1:
        raise ValueError("need at least one sample")
    spec = segment_spec(trace)
    theta = theta_of(trace.pair()[1])
    samples: list[QVec2] = []
    for i in range(count):
        t = -spec.half + 2 * spec.half * Fraction(i + 1, count + 1)
        point = spec.point_at(t)
        assert line_value(spec.normal, point) == 0
        dx = point[0] - theta[0]
        dy = point[1] - theta[1]
        assert dx * dx + dy * dy < 1
        samples.append(point)
    return samples


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of one witness search at stage nu for one sample point.

    x is the integer coordinate of the witness, err_hi and err_lo bound
    max_i dist(theta_i*x - eta_i, Z) from above and below over the tail
    interval around theta_M, and bound is a certified lower bound on
    omega(x)/x.  passed means err_hi < bound held with exact arithmetic;
    nonzero_certified means err_lo > 0, so the error provably does not
    vanish.
    """

    eta: QVec2
    nu: int
    eta_line: QVec2
    y: IVec3
    x: int
    err_hi: Fraction
    err_lo: Fraction
    bound: Fraction
    passed: bool
    nonzero_certified: bool


def find_witness(
    trace: Trace, nu: int, eta: QVec2, truncated: bool = False
) -> WitnessReport:
    """Search the stage-nu plane for an integer witness of the sample eta.

    The sample is projected onto the stage-nu line, lifted to the plane,
    and a fundamental-domain rectangle around the lift is scanned for a
    plane-lattice point y; x = y0 - 1 after re-anchoring to make x >= 1.
    With truncated=True the tail radius is treated as zero, so the error
    interval collapses to the exact value against theta_M itself.
    """
    if not 2 <= nu < trace.last_index:
        raise ValueError("witness stage must satisfy 2 <= nu < last index")
    rec = trace.steps[nu - 1]
    prev = trace.steps[nu - 2].z
    eta_line = project_to_line(rec.N, eta)
    anchor = QVec3(Fraction(1), -eta_line[0], -eta_line[1])
    lattice = PlaneLattice(prev, rec.z)
    frame = Frame(lattice)
    s_half = Fraction(1, frame.z_normsq)
    rect = LevelRect(
        anchor=anchor,
        t_lo=Fraction(0),
        t_hi=Fraction(1),
        s_lo=-s_half,
        s_hi=s_half,
        level=0,
    )
    y = find_point_in_level_rect(lattice, rec.zp, rect)
    x = y.x0 - 1
    while x < 1:
        y = y + rec.z
        x = y.x0 - 1
    theta_m, tail = theta_with_tail(trace, trace.last_index)
    if truncated:
        tail = Fraction(0)
    slack = x * tail
    hi_parts = []
    lo_parts = []
    for i in (0, 1):
        c = theta_m[i] * x - eta[i] - (y.x1, y.x2)[i]
        d_lo, d_hi = dist_interval_to_int(c - slack, c + slack)
        lo_parts.append(d_lo)
        hi_parts.append(d_hi)
    err_hi = max(hi_parts)
    err_lo = max(lo_parts)
    bound = trace.omega.enclosure(Fraction(x), _BOUND_BITS).lo / x
    return WitnessReport(
        eta=eta,
        nu=nu,
        eta_line=eta_line,
        y=y,
        x=x,
        err_hi=err_hi,
        err_lo=err_lo,
        bound=bound,
        passed=err_hi < bound,
        nonzero_certified=err_lo > 0,
    )


def bad_statistic(
    trace: Trace, eta: QVec2, nu_lo: int = 3, nu_hi: int | None = None
) -> list[tuple[int, Fraction]]:
    """Running minimum of x * err_hi^2 over witness stages for one sample.

    The squared form keeps every entry rational; the running minimum makes
    the reported sequence non-increasing, so later stages can only improve
    the certified approximation statistic.
    """
    if nu_hi is None:
        nu_hi = trace.last_index - 1
    rows: list[tuple[int, Fraction]] = []
    best: Fraction | None = None
    for nu in range(nu_lo, nu_hi + 1):
        rep = find_witness(trace, nu, eta)
        raw = rep.x * rep.err_hi * rep.err_hi
        best = raw if best is None else min(best, raw)
        rows.append((nu, best))
    return rows


def homogeneous_report(trace: Trace) -> list[tuple[int, int, Fraction]]:
    """Certified bounds q_nu^3 * tail(nu)^2 on q * max_i dist(q*theta_i, Z)^2.

    q_nu * theta_i differs from the integer z_i by at most q_nu times the
    distance from theta to theta_nu, which tail(nu) bounds.
    """
    rows = []
    for rec in trace.steps:
        tail = trace.tail(rec.nu)
        rows.append((rec.nu, rec.q, rec.q**3 * tail * tail))
    return rows


def _geometry_flags(trace: Trace, rec: StepRecord) -> dict[str, bool]:
    """Recompute the per-step exact checks used by the asymptotics report.

    alpha_ok replays the admissibility test on the recorded alpha (restarts
    may have halved it below the maximal choice, which is still legal).
    """
    from .construct import _OMEGA_BITS, _det_bound_ok, build_step_geometry

    prev = trace.seed[0] if rec.nu == 1 else trace.steps[rec.nu - 2].z
    lattice = PlaneLattice(prev, rec.z)
    z_sq = dot(rec.z, rec.z)
    flags: dict[str, bool] = {}
    flags["contraction_ok"] = rec.contraction <= trace.eps0 * Fraction(1, 2**rec.nu)
    try:
        a_hi = rec.alpha * sqrt_upper(Fraction(rec.d_sq * z_sq), _OMEGA_BITS)
        arg = Fraction(rec.q * rec.q) / (rec.d_sq * a_hi)
        rhs = trace.omega.enclosure(arg, _OMEGA_BITS).lo
        flags["alpha_ok"] = rec.nu * a_hi * rec.d_sq <= rhs
    except PrecisionExhausted:
        flags["alpha_ok"] = False
    t_val = (
        rec.alpha
        * rec.alpha
        * z_sq
        * min(Fraction(1), Fraction(rec.d_sq, rec.q * rec.q))
    )
    flags["beta_ok"] = t_val / 4 <= rec.beta * rec.beta <= t_val
    try:
        build_step_geometry(lattice, rec.zp, rec.alpha, rec.beta)
        flags["cone_ok"] = True
    except (ConeViolation, NotABasis):
        flags["cone_ok"] = False
    next_z = trace.steps[rec.nu].z if rec.nu < len(trace.steps) else trace.tip
    n_next = cross(rec.z, next_z)
    flags["det_bound_ok"] = _det_bound_ok(
        trace.omega, rec.nu, dot(n_next, n_next), next_z.x0
    )
    return flags


def asymptotics_report(trace: Trace) -> str:
    """CSV text with one row per step: squared-form ratios and exact checks.

    Ratios use only rational arithmetic.  sigma_ratio_sq is the squared
    width ratio q^2/|z|^2 of the sampled rectangle, znorm_ratio_sq tracks
    |Z|^2 d^2 b^2 / q^2, growth_ratio_sq tracks q_next^2 a^2 d^2 / q^4,
    angle_ratio_sq compares the plane turn to (b/a)^2, and drift_ratio_sq
    compares the theta step to sqrt(a^2+b^2)/q in squared form.
    """
    from .construct import build_step_geometry

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        [
            "nu",
            "q_digits",
            "sigma_ratio_sq",
            "znorm_ratio_sq",
            "growth_ratio_sq",
            "angle_ratio_sq",
            "drift_ratio_sq",
            "contraction_ok",
            "alpha_ok",
            "beta_ok",
            "cone_ok",
            "det_bound_ok",
        ]
    )
    for rec in trace.steps:
        prev = trace.seed[0] if rec.nu == 1 else trace.steps[rec.nu - 2].z
        next_z = trace.steps[rec.nu].z if rec.nu < len(trace.steps) else trace.tip
        lattice = PlaneLattice(prev, rec.z)
        z_sq = dot(rec.z, rec.z)
        q_sq = rec.q * rec.q
        a_sq = rec.a_eff_sq
        b_sq = rec.b_eff_sq
        geo = build_step_geometry(lattice, rec.zp, rec.alpha, rec.beta)
        z_cap_sq = qnorm_sq(geo.Z)
        sigma_ratio = Fraction(q_sq, z_sq)
        znorm_ratio = z_cap_sq * lattice.d_sq * b_sq / q_sq
        growth_ratio = Fraction(next_z.x0**2) * a_sq * lattice.d_sq**2 / q_sq**2
        n_next = cross(rec.z, next_z)
        turn = cross(lattice.normal, n_next)
        angle_sq = Fraction(dot(turn, turn), lattice.d_sq * dot(n_next, n_next))
        angle_ratio = angle_sq * a_sq / b_sq
        drift_ratio = rec.contraction**2 * q_sq / (a_sq + b_sq)
        flags = _geometry_flags(trace, rec)
        writer.writerow(
            [
                rec.nu,
                len(str(rec.q)),
                f"{float(sigma_ratio):.6e}",
                f"{float(znorm_ratio):.6e}",
                f"{float(growth_ratio):.6e}",
                f"{float(angle_ratio):.6e}",
                f"{float(drift_ratio):.6e}",
                flags["contraction_ok"],
                flags["alpha_ok"],
                flags["beta_ok"],
                flags["cone_ok"],
                flags["det_bound_ok"],
            ]
        )
    return buf.getvalue()
