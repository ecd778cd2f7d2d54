"""Inductive construction of approximation vectors avoiding low-height planes.

Each step works in the plane lattice spanned by the last two vectors z_prev
and z, completes it to a basis of Z^3, and picks the next vector on the
adjacent lattice plane from a shifted rectangle placed inside the cone of
directions between z and a slightly rotated companion ray.  The step
parameters alpha (in-plane tilt) and beta (out-of-plane lift) are dyadic,
so every geometric check is an exact rational comparison.  The resulting
rational points theta_nu = (z1/z0, z2/z0) converge with a certified tail
bound, which in turn yields finite independence certificates against all
integer relations of bounded height.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (
    ConeViolation,
    NegativeBound,
    NotABasis,
    PrecisionExhausted,
    StepFailed,
    ZeroVector,
)
from .lattice import Frame, LevelRect, PlaneLattice, feasible_rows
from .omega import Omega, cmp_sq_value
from .rationals import dyadic, floor_log2, sqrt_upper
from .vectors import IVec3, QVec3, complete_to_basis, content, cross, det3, dot, norm_sq

QVec2 = tuple[Fraction, Fraction]

# bracket limit for the alpha exponent; the required k grows with the bit
# length of q, so this is a sanity cap, not a tuning knob
_ALPHA_SCAN_CAP = 1 << 24
# whole-step restarts with halved alpha (contraction cap or empty candidate set)
_ALPHA_HALVINGS = 64
# t_shift doublings before declaring the cone predicate broken
_CONE_DOUBLINGS = 64
_OMEGA_BITS = 64


def theta_of(y: IVec3) -> QVec2:
    """Projective normalization (y1/y0, y2/y0); requires y0 > 0."""
    if y.x0 <= 0:
        raise ValueError(f"nonpositive denominator coordinate in {y}")
    return (Fraction(y.x1, y.x0), Fraction(y.x2, y.x0))


def theta_gap(a: QVec2, b: QVec2) -> Fraction:
    """Sup-distance between two rational plane points."""
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


@dataclass
class StepRecord:
    """Everything step nu used and produced, enough to replay all checks."""

    nu: int
    z: IVec3
    q: int
    N: IVec3
    d_sq: int
    zp: IVec3
    alpha: Fraction
    beta: Fraction
    t_shift: Fraction
    theta: QVec2
    contraction: Fraction
    det_bound_ok: bool

    @property
    def a_eff_sq(self) -> Fraction:
        """Exact square of the effective in-plane step length."""
        return self.alpha * self.alpha * self.d_sq * norm_sq(self.z)

    @property
    def b_eff_sq(self) -> Fraction:
        """Exact square of the effective out-of-plane step length."""
        return self.beta * self.beta * self.d_sq


@dataclass(frozen=True)
class Certificate:
    """Witness that the relation m0 + m1*t1 + m2*t2 = 0 fails at the limit."""

    m: IVec3
    nu: int
    margin: Fraction


@dataclass
class Trace:
    """A run of the construction: seed pair, executed steps, current tip.

    The tip is the newest vector z_{S+1} produced by the last step (or the
    second seed vector before any step has run); the pair for the next
    step is (steps[-1].z, tip).
    """

    omega: Omega
    seed: tuple[IVec3, IVec3]
    eps0: Fraction = Fraction(1, 8)
    forbidden_checked: int = 10
    steps: list[StepRecord] = field(default_factory=list)
    tip: Optional[IVec3] = None

    def __post_init__(self) -> None:
        if self.tip is None:
            self.tip = self.seed[1]
        PlaneLattice(self.seed[0], self.seed[1])
        if self.eps0 <= 0:
            raise ValueError("contraction budget must be positive")
        if self.forbidden_checked < 0:
            raise NegativeBound("relation height bound must be nonnegative")

    @property
    def last_index(self) -> int:
        """Index of the newest available theta (the tip's)."""
        return len(self.steps) + 1

    def pair(self) -> tuple[IVec3, IVec3]:
        prev = self.steps[-1].z if self.steps else self.seed[0]
        return prev, self.tip

    def theta_at(self, nu: int) -> QVec2:
        if not 1 <= nu <= self.last_index:
            raise IndexError(f"theta index {nu} outside 1..{self.last_index}")
        if nu <= len(self.steps):
            return self.steps[nu - 1].theta
        return theta_of(self.tip)

    def tail(self, nu: int) -> Fraction:
        """Certified bound on |theta_limit - theta_nu|_inf.

        Exact sum of the recorded contractions from nu on, plus the
        geometric budget eps0 * 2^-(M-1) for all steps not yet run (each
        future step mu is forced to contract by at most eps0 * 2^-mu).
        """
        m = self.last_index
        if not 1 <= nu <= m:
            raise IndexError(f"tail index {nu} outside 1..{m}")
        total = sum((rec.contraction for rec in self.steps[nu - 1 :]), Fraction(0))
        return total + self.eps0 * dyadic(-(m - 1))

    @property
    def nu0(self) -> Optional[int]:
        """Start of the longest suffix of steps passing the determinant bound.

        None when the newest step fails it (no valid suffix yet).
        """
        flags = [rec.det_bound_ok for rec in self.steps]
        if not flags or not flags[-1]:
            return None
        nu = len(flags)
        while nu > 1 and flags[nu - 2]:
            nu -= 1
        return nu


def theta_with_tail(trace: Trace, nu: int) -> tuple[QVec2, Fraction]:
    """theta_nu together with its certified limit-distance bound."""
    return trace.theta_at(nu), trace.tail(nu)


def choose_alpha(
    nu: int, d_sq: int, q: int, z_normsq: int, omega: Omega, bits: int = _OMEGA_BITS
) -> Fraction:
    """Largest alpha = 2^-k, k >= 1, passing the slow-growth admissibility test.

    The test is nu * a_hi * d_sq <= omega_lo(q^2 / (d_sq * a_hi)) where
    a_hi = alpha * sqrt_upper(d_sq * z_normsq) bounds the effective step
    length from above; a_hi appears on the large side of both the left
    side and the function argument, and the function value is taken at
    its interval lower bound, so the accepted alpha verifies the test
    under any later refinement as well.
    """
    if nu < 1 or d_sq < 1 or q < 1:
        raise ValueError("step index, determinant and denominator must be >= 1")
    root_hi = sqrt_upper(Fraction(d_sq * z_normsq), bits)

    def admissible(k: int) -> bool:
        a_hi = dyadic(-k) * root_hi
        lhs = nu * a_hi * d_sq
        rhs = omega.enclosure(Fraction(q * q) / (d_sq * a_hi), bits).lo
        return lhs <= rhs

    # the test is monotone in k (left side shrinks, right side grows), so
    # bracket the threshold exponentially and binary-search the boundary
    hi = 1
    while not admissible(hi):
        hi *= 2
        if hi > _ALPHA_SCAN_CAP:
            raise StepFailed(f"no admissible alpha above 2^-{_ALPHA_SCAN_CAP}")
    lo = max(1, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if admissible(mid):
            hi = mid
        else:
            lo = mid + 1
    return dyadic(-hi)


def choose_beta(alpha: Fraction, d_sq: int, q: int, z_normsq: int) -> Fraction:
    """Dyadic beta with b_eff in [target/2, target], checked on squares.

    target = a_eff * min(1, sqrt(d_sq)/q); squaring removes both roots,
    so the sandwich target^2/4 <= beta^2 * d_sq <= target^2 is exact.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    t = alpha * alpha * z_normsq * min(Fraction(1), Fraction(d_sq, q * q))
    e = floor_log2(t)
    j = -(e // 2)
    beta = dyadic(-j)
    b_sq = beta * beta
    if not t / 4 <= b_sq <= t:
        raise StepFailed(f"beta sandwich failed: {b_sq} not in [{t}/4, {t}]")
    return beta


@dataclass(frozen=True)
class StepGeometry:
    """Auxiliary points and the target rectangle of one step."""

    za: QVec3
    zb: QVec3
    Z: QVec3
    rect: LevelRect
    t_shift: Fraction


def _smallest_pow2_at_least(x: Fraction) -> Fraction:
    e = floor_log2(x)
    p = dyadic(e)
    return p if p == x else dyadic(e + 1)


def _in_cone(frame: Frame, origin: QVec3, w: QVec3, alpha: Fraction) -> bool:
    """Cone between the ray of z and its alpha-tilt: s >= 0 and s <= alpha*t."""
    t = frame.t_of(w, origin)
    s = frame.s_of(w, origin)
    return s >= 0 and s <= alpha * t


def build_step_geometry(
    lattice: PlaneLattice, zp: IVec3, alpha: Fraction, beta: Fraction
) -> StepGeometry:
    """Tilted companion za, lifted zb, its level-1 projection Z, and the rect.

    The rectangle sits t_shift z-lengths ahead of Z, has unit t-extent and
    s-extent 2/|z|^2, and is shifted by (1/|z|^2) e so its lower edge lies
    on the cone boundary s = 0; t_shift is the smallest power of two (at
    least 2/(alpha |z|^2), doubled on demand) making all four corners pass
    the cone predicate.
    """
    if lattice.check_completion(zp) != 1:
        raise NotABasis("completion must have determinant +1")
    frame = Frame(lattice)
    z, e = frame.z, frame.e
    z_sq = frame.z_normsq
    za = z.as_qvec() + e.as_qvec().scale(alpha)
    zb = za + lattice.normal.as_qvec().scale(beta)
    # dot(zb, N) = beta * d_sq exactly since z and e are in the plane
    big_z = zb.scale(Fraction(1) / (beta * lattice.d_sq))
    s_half = Fraction(1, z_sq)
    t_shift = _smallest_pow2_at_least(Fraction(2) / (alpha * z_sq))
    for _ in range(_CONE_DOUBLINGS):
        anchor = big_z + z.as_qvec().scale(t_shift) + e.as_qvec().scale(s_half)
        rect = LevelRect(
            anchor=anchor,
            t_lo=Fraction(0),
            t_hi=Fraction(1),
            s_lo=-s_half,
            s_hi=s_half,
            level=1,
        )
        corners_ok = all(
            _in_cone(
                frame,
                big_z,
                anchor + z.as_qvec().scale(tc) + e.as_qvec().scale(sc),
                alpha,
            )
            for tc in (rect.t_lo, rect.t_hi)
            for sc in (rect.s_lo, rect.s_hi)
        )
        if corners_ok:
            return StepGeometry(za=za, zb=zb, Z=big_z, rect=rect, t_shift=t_shift)
        t_shift *= 2
    raise ConeViolation("rectangle corners escape the cone at every tested shift")


def forbidden_relations(bound: int) -> list[IVec3]:
    """Nonzero integer relations with |m|_inf <= bound, one per +-pair.

    Canonical signs: the first nonzero coordinate is positive.
    """
    if bound < 0:
        raise NegativeBound("relation height bound must be nonnegative")
    out = []
    full = range(-bound, bound + 1)
    for m1 in full:
        for m2 in full:
            if m1 > 0 or (m1 == 0 and m2 > 0):
                out.append(IVec3(0, m1, m2))
    for m0 in range(1, bound + 1):
        for m1 in full:
            for m2 in full:
                out.append(IVec3(m0, m1, m2))
    return out


def certify_independence(trace: Trace, m: IVec3) -> Optional[Certificate]:
    """Certificate that 1, theta1, theta2 never satisfy the relation m.

    Issued at the first index nu where |m0 + m1 th1 + m2 th2| exceeds
    (|m1| + |m2|) * tail(nu): the limit then stays on the same side of
    the plane of m, at positive distance.  None means undecided (never
    disproved: the limit is irrational while m has integer entries).
    """
    if m.is_zero():
        raise ZeroVector("independence relation must be nonzero")
    weight = abs(m.x1) + abs(m.x2)
    for nu in range(1, trace.last_index + 1):
        th = trace.theta_at(nu)
        value = abs(m.x0 + m.x1 * th[0] + m.x2 * th[1])
        margin = value - weight * trace.tail(nu)
        if margin > 0:
            return Certificate(m=m, nu=nu, margin=margin)
    return None


def _det_bound_ok(omega: Omega, nu: int, d_next_sq: int, q_next: int) -> bool:
    """Exact check of nu^2 * d_{nu+1}^2 <= omega(q_{nu+1})^2."""
    try:
        return cmp_sq_value(omega, q_next, Fraction(nu * nu * d_next_sq)) <= 0
    except PrecisionExhausted:
        return False


def _isolated_hit(forbidden: list[IVec3], z: IVec3, y: IVec3) -> bool:
    """True when y lies on a forbidden plane that the line y + k z leaves.

    Planes containing the whole candidate line (normal orthogonal to z)
    are exempt: they cannot be avoided inside this step, and the next
    step leaves them with distance exactly 1/q by the level-1 mechanism.
    """
    return any(dot(m, y) == 0 and dot(m, z) != 0 for m in forbidden)


def _pick_candidate(
    z: IVec3,
    q: int,
    theta_nu: QVec2,
    cap: Fraction,
    budget: Fraction,
    uncleared: list[IVec3],
    forbidden: list[IVec3],
    y_base: IVec3,
    scan: int,
) -> Optional[tuple[IVec3, Fraction]]:
    """Best point on the row line y_base + k z, k in [0, scan).

    Admissible candidates grow the denominator and respect the
    contraction cap.  Among them, maximize the number of not yet
    certified relations pushed outside the future tail budget; break
    ties by the largest worst-case margin, then by the smallest k.
    Returns None when no candidate is admissible (caller halves alpha).
    """
    admissible = []
    cands = {}
    y = y_base
    for k in range(scan):
        if k:
            y = y + z
        if y.x0 <= q:
            continue
        th = theta_of(y)
        con = theta_gap(th, theta_nu)
        if con <= cap:
            admissible.append(k)
            cands[k] = (y, con)
    if not admissible:
        return None

    pe, pd = budget.numerator, budget.denominator
    scores = dict.fromkeys(admissible, 0)
    if uncleared:
        y00, q0 = y_base.x0, q
        for m in uncleared:
            base = dot(m, y_base)
            inc = dot(m, z)
            w = (abs(m.x1) + abs(m.x2)) * pe
            for k in admissible:
                if abs(base + k * inc) * pd > w * (y00 + k * q0):
                    scores[k] += 1

    remaining = set(admissible)
    while remaining:
        top = max(scores[k] for k in remaining)
        tier = [k for k in admissible if k in remaining and scores[k] == top]
        if uncleared:
            tier.sort(key=lambda k: (-_min_margin(uncleared, z, y_base, q, pe, pd, k), k))
        for k in tier:
            y, con = cands[k]
            if not _isolated_hit(forbidden, z, y):
                return y, con
        remaining.difference_update(tier)
    return None


def _min_margin(
    uncleared: list[IVec3],
    z: IVec3,
    y_base: IVec3,
    q: int,
    pe: int,
    pd: int,
    k: int,
) -> Fraction:
    """Worst clearance margin of candidate k over the uncertified relations."""
    y0 = y_base.x0 + k * q
    worst = None
    for m in uncleared:
        u = abs(dot(m, y_base) + k * dot(m, z)) * pd - (abs(m.x1) + abs(m.x2)) * pe * y0
        if worst is None or u < worst:
            worst = u
    return Fraction(worst, pd * y0)


def advance(trace: Trace) -> StepRecord:
    """Execute one construction step, append its record, move the tip.

    The step index is the current tip index: step nu consumes the pair
    (z_{nu-1}, z_nu) and produces z_{nu+1}.  Restarts with halved alpha
    when no candidate passes the contraction cap; fails hard only when
    the restart budget runs out.
    """
    nu = trace.last_index
    z_prev, z = trace.pair()
    lattice = PlaneLattice(u=z_prev, v=z)
    zp = complete_to_basis(z_prev, z)
    frame = Frame(lattice)
    d_sq = lattice.d_sq
    q = z.x0
    if q < 1:
        raise StepFailed(f"step {nu}: current denominator {q} is not positive")
    z_sq = frame.z_normsq
    theta_nu = theta_of(z)
    cap = trace.eps0 * dyadic(-nu)
    budget = trace.eps0 * dyadic(-nu)
    forbidden = forbidden_relations(trace.forbidden_checked)
    uncleared = [m for m in forbidden if certify_independence(trace, m) is None]
    scan = 2 * max(1, trace.forbidden_checked) ** 3
    alpha0 = choose_alpha(nu, d_sq, q, z_sq, trace.omega)

    for halving in range(_ALPHA_HALVINGS):
        alpha = alpha0 * dyadic(-halving)
        beta = choose_beta(alpha, d_sq, q, z_sq)
        geo = build_step_geometry(lattice, zp, alpha, beta)
        best = None
        for m, n_lo, _ in feasible_rows(lattice, zp, geo.rect):
            y_row = lattice.point(zp, 1, m, n_lo)
            dn_sq = norm_sq(cross(z, y_row))
            if best is None or dn_sq < best[0]:
                best = (dn_sq, y_row)
        if best is None:
            continue
        d_next_sq, y_base = best
        pick = _pick_candidate(
            z, q, theta_nu, cap, budget, uncleared, forbidden, y_base, scan
        )
        if pick is None:
            continue
        y, contraction = pick
        if det3(y, z_prev, z) != 1:
            raise StepFailed(f"step {nu}: picked point is not at level 1")
        if not _in_cone(frame, geo.Z, y.as_qvec(), alpha):
            raise StepFailed(f"step {nu}: picked point escaped the cone")
        rec = StepRecord(
            nu=nu,
            z=z,
            q=q,
            N=lattice.normal,
            d_sq=d_sq,
            zp=zp,
            alpha=alpha,
            beta=beta,
            t_shift=geo.t_shift,
            theta=theta_nu,
            contraction=contraction,
            det_bound_ok=_det_bound_ok(trace.omega, nu, d_next_sq, y.x0),
        )
        trace.steps.append(rec)
        trace.tip = y
        return rec
    raise StepFailed(
        f"step {nu}: no admissible candidate after {_ALPHA_HALVINGS} alpha halvings"
    )


def run_trace(
    seed: tuple[IVec3, IVec3],
    omega: Omega,
    steps: int,
    forbidden_bound: int = 10,
    eps0: Fraction = Fraction(1, 8),
) -> Trace:
    """Run the construction for a number of steps from a primitive seed pair."""
    if steps < 0:
        raise NegativeBound("step count must be nonnegative")
    trace = Trace(
        omega=omega, seed=seed, eps0=eps0, forbidden_checked=forbidden_bound
    )
    for _ in range(steps):
        advance(trace)
    return trace


def replay_invariants(trace: Trace) -> list[str]:
    """Re-derive every per-step check from the recorded data alone.

    Returns human-readable violation messages; empty means the trace is
    internally consistent.  Used by tests and by the trace verifier.
    """
    problems: list[str] = []

    def bad(msg: str) -> None:
        problems.append(msg)

    chain = [trace.seed[0], trace.seed[1]] + [rec.z for rec in trace.steps[1:]]
    chain.append(trace.tip)
    if trace.steps and trace.steps[0].z != trace.seed[1]:
        bad("first step does not start at the seed")
    for i, rec in enumerate(trace.steps):
        nu = i + 1
        z_prev, z, y = chain[i], chain[i + 1], chain[i + 2]
        if rec.nu != nu:
            bad(f"step {nu}: stored index {rec.nu}")
        if rec.z != z:
            bad(f"step {nu}: chain broken")
        if rec.q != z.x0:
            bad(f"step {nu}: q mismatch")
        n = cross(z_prev, z)
        if rec.N != n:
            bad(f"step {nu}: normal mismatch")
        if content(n) != 1:
            bad(f"step {nu}: pair not primitive")
        if rec.d_sq != norm_sq(n):
            bad(f"step {nu}: d_sq mismatch")
        if det3(rec.zp, z_prev, z) != 1:
            bad(f"step {nu}: completion determinant is not +1")
        if dot(y, n) != 1:
            bad(f"step {nu}: next vector is not at level 1")
        if y.x0 <= z.x0:
            bad(f"step {nu}: denominator did not grow")
        if rec.theta != theta_of(z):
            bad(f"step {nu}: theta mismatch")
        con = theta_gap(theta_of(y), rec.theta)
        if rec.contraction != con:
            bad(f"step {nu}: contraction mismatch")
        if con > trace.eps0 * dyadic(-nu):
            bad(f"step {nu}: contraction cap violated")
        for name, val in (("alpha", rec.alpha), ("beta", rec.beta)):
            num, den = val.numerator, val.denominator
            if not (num > 0 and (num & (num - 1)) == 0 and (den & (den - 1)) == 0):
                bad(f"step {nu}: {name} is not a power of two")
        # slow-growth admissibility, replayed conservatively
        z_sq = norm_sq(z)
        a_hi = rec.alpha * sqrt_upper(Fraction(rec.d_sq * z_sq), _OMEGA_BITS)
        arg = Fraction(z.x0 * z.x0) / (rec.d_sq * a_hi)
        if nu * a_hi * rec.d_sq > trace.omega.enclosure(arg, _OMEGA_BITS).lo:
            bad(f"step {nu}: alpha admissibility test fails on replay")
        target_sq = rec.a_eff_sq * min(Fraction(1), Fraction(rec.d_sq, rec.q * rec.q))
        if not target_sq / 4 <= rec.b_eff_sq <= target_sq:
            bad(f"step {nu}: beta sandwich fails on replay")
        lattice = PlaneLattice(u=z_prev, v=z)
        geo = build_step_geometry(lattice, rec.zp, rec.alpha, rec.beta)
        if geo.t_shift != rec.t_shift:
            bad(f"step {nu}: t_shift mismatch on replay")
        if not _in_cone(Frame(lattice), geo.Z, y.as_qvec(), rec.alpha):
            bad(f"step {nu}: next vector outside the cone")
        d_next_sq = norm_sq(cross(z, y))
        if rec.det_bound_ok != _det_bound_ok(trace.omega, nu, d_next_sq, y.x0):
            bad(f"step {nu}: determinant bound flag mismatch")
    return problems
