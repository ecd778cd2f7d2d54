"""Construction steps: step sizing, cone geometry, traces, certificates."""

import random
from fractions import Fraction

import pytest

from badline.construct import (
    Certificate,
    StepRecord,
    Trace,
    build_step_geometry,
    certify_independence,
    choose_alpha,
    choose_beta,
    forbidden_relations,
    replay_invariants,
    run_trace,
    theta_of,
    theta_gap,
    theta_with_tail,
)
from badline.errors import NegativeBound, NotABasis, NotPrimitivePair, ZeroVector
from badline.lattice import Frame, PlaneLattice, rect_coords
from badline.omega import LogOmega, LogLogOmega
from badline.rationals import dyadic, floor_log2, sqrt_upper
from badline.vectors import IVec3, complete_to_basis, cross, det3, dot, norm_sq, qdot

SEED = (IVec3(1, 0, 0), IVec3(1, 1, 0))


def test_theta_of_and_gap():
    assert theta_of(IVec3(2, 3, -1)) == (Fraction(3, 2), Fraction(-1, 2))
    assert theta_gap((Fraction(0), Fraction(0)), (Fraction(1, 3), Fraction(-1, 2))) == Fraction(1, 2)
    assert theta_gap((Fraction(1), Fraction(1)), (Fraction(1), Fraction(1))) == 0
    with pytest.raises(ValueError):
        theta_of(IVec3(0, 1, 1))
    with pytest.raises(ValueError):
        theta_of(IVec3(-2, 1, 1))


def alpha_admissible(nu, d_sq, q, z_sq, omega, alpha):
    a_hi = alpha * sqrt_upper(Fraction(d_sq * z_sq), 64)
    lhs = nu * a_hi * d_sq
    return lhs <= omega.enclosure(Fraction(q * q) / (d_sq * a_hi), 64).lo


def test_choose_alpha_maximal_admissible():
    rng = random.Random(61)
    omega = LogOmega()
    for _ in range(40):
        nu = rng.randint(1, 6)
        d_sq = rng.randint(1, 50)
        q = rng.randint(1, 10**6)
        z_sq = rng.randint(1, 200)
        alpha = choose_alpha(nu, d_sq, q, z_sq, omega)
        k = -floor_log2(alpha)
        assert alpha == dyadic(-k) and k >= 1
        assert alpha_admissible(nu, d_sq, q, z_sq, omega, alpha)
        if k > 1:
            assert not alpha_admissible(nu, d_sq, q, z_sq, omega, 2 * alpha)
    with pytest.raises(ValueError):
        choose_alpha(0, 1, 1, 1, omega)
    with pytest.raises(ValueError):
        choose_alpha(1, 1, 0, 1, omega)


def test_choose_alpha_shrinks_with_step_index():
    omega = LogOmega()
    a3 = choose_alpha(3, 9, 1000, 50, omega)
    a6 = choose_alpha(6, 9, 1000, 50, omega)
    assert a6 <= a3
    # slower-growing weight functions force smaller tilts
    assert choose_alpha(3, 9, 1000, 50, LogLogOmega()) <= a3


def test_choose_beta_sandwich():
    rng = random.Random(62)
    for _ in range(200):
        alpha = dyadic(-rng.randint(1, 40))
        d_sq = rng.randint(1, 60)
        q = rng.randint(1, 10**4)
        z_sq = rng.randint(1, 300)
        beta = choose_beta(alpha, d_sq, q, z_sq)
        assert beta == dyadic(floor_log2(beta))  # a power of two
        t = alpha * alpha * z_sq * min(Fraction(1), Fraction(d_sq, q * q))
        assert t / 4 <= beta * beta <= t
    with pytest.raises(ValueError):
        choose_beta(Fraction(0), 1, 1, 1)


def test_choose_beta_branches():
    # d >= q: the min is 1 and beta tracks alpha |z| alone
    b_flat = choose_beta(Fraction(1, 4), 25, 2, 16)
    t_flat = Fraction(1, 16) * 16
    assert t_flat / 4 <= b_flat * b_flat <= t_flat
    # d < q: the q-penalty shrinks beta
    b_steep = choose_beta(Fraction(1, 4), 25, 1000, 16)
    assert b_steep < b_flat


def test_build_step_geometry_points():
    lattice = PlaneLattice(SEED[0], SEED[1])
    zp = complete_to_basis(SEED[0], SEED[1])
    frame = Frame(lattice)
    alpha, beta = Fraction(1, 4), Fraction(1, 8)
    geo = build_step_geometry(lattice, zp, alpha, beta)
    z_q = frame.z.as_qvec()
    e_q = frame.e.as_qvec()
    assert geo.za == z_q + e_q.scale(alpha)
    assert geo.zb - geo.za == lattice.normal.as_qvec().scale(beta)
    # zb projects to the level-1 plane: (zb, N) = beta d_sq, so Z has (Z, N) = 1
    n_q = lattice.normal.as_qvec()
    assert qdot(geo.zb, n_q) == beta * lattice.d_sq
    assert qdot(geo.Z, n_q) == 1
    # unit t-extent, s-extent 2/|z|^2, anchored one s-half above the axis
    rect = geo.rect
    assert rect.t_hi - rect.t_lo == 1
    assert rect.s_hi - rect.s_lo == Fraction(2, frame.z_normsq)
    assert rect.level == 1
    # all four corners lie in the cone 0 <= s <= alpha t over Z
    for tc in (rect.t_lo, rect.t_hi):
        for sc in (rect.s_lo, rect.s_hi):
            corner = rect.anchor + z_q.scale(tc) + e_q.scale(sc)
            t, s = rect_coords(frame, geo.Z, corner)
            assert 0 <= s <= alpha * t
    assert geo.t_shift == dyadic(floor_log2(geo.t_shift))
    assert geo.t_shift >= 2 / (alpha * frame.z_normsq)


def test_build_step_geometry_rejects_reversed_completion():
    lattice = PlaneLattice(SEED[0], SEED[1])
    zp = complete_to_basis(SEED[0], SEED[1])
    with pytest.raises(NotABasis):
        build_step_geometry(lattice, -zp, Fraction(1, 4), Fraction(1, 8))


def test_run_trace_zero_steps():
    trace = run_trace(SEED, LogOmega(), 0)
    assert trace.steps == [] and trace.tip == SEED[1]
    assert trace.last_index == 1
    assert trace.theta_at(1) == (Fraction(1), Fraction(0))
    assert trace.tail(1) == trace.eps0
    with pytest.raises(NegativeBound):
        run_trace(SEED, LogOmega(), -1)
    with pytest.raises(NotPrimitivePair):
        run_trace((IVec3(2, 0, 0), IVec3(0, 2, 0)), LogOmega(), 0)


def test_trace_reference_shape(trace5):
    assert [len(str(rec.q)) for rec in trace5.steps] == [1, 3, 5, 13, 24]
    assert [-floor_log2(rec.alpha) for rec in trace5.steps] == [1, 10, 54, 79, 233]
    assert [rec.det_bound_ok for rec in trace5.steps] == [True, False, False, False, False]
    assert trace5.nu0 is None
    qs = [rec.q for rec in trace5.steps] + [trace5.tip.x0]
    assert all(a < b for a, b in zip(qs, qs[1:]))


def test_trace_chain_and_replay(trace5):
    chain = [trace5.seed[0], trace5.seed[1]] + [r.z for r in trace5.steps[1:]]
    chain.append(trace5.tip)
    for prev, cur, nxt in zip(chain, chain[1:], chain[2:]):
        assert det3(nxt, prev, cur) == 1
    assert replay_invariants(trace5) == []


def test_trace_indexing(trace5):
    with pytest.raises(IndexError):
        trace5.theta_at(0)
    with pytest.raises(IndexError):
        trace5.theta_at(trace5.last_index + 1)
    with pytest.raises(IndexError):
        trace5.tail(0)


def test_tail_telescopes(trace5):
    m = trace5.last_index
    floor = trace5.eps0 * dyadic(-(m - 1))
    assert trace5.tail(m) == floor
    for nu in range(1, m):
        assert trace5.tail(nu) - trace5.tail(nu + 1) == trace5.steps[nu - 1].contraction
        assert trace5.steps[nu - 1].contraction <= trace5.eps0 * dyadic(-nu)
    # recorded thetas stay within the certified tail of the newest one
    final = trace5.theta_at(m)
    for nu in range(1, m + 1):
        theta, tail = theta_with_tail(trace5, nu)
        assert theta_gap(theta, final) <= tail


def test_step_records_replay_postconditions(trace5):
    chain = [trace5.seed[0], trace5.seed[1]] + [r.z for r in trace5.steps[1:]]
    for prev, rec in zip(chain, trace5.steps):
        assert rec.N == cross(prev, rec.z)
        assert rec.d_sq == norm_sq(rec.N)
        assert rec.q == rec.z.x0
        assert det3(rec.zp, prev, rec.z) == 1
        assert rec.theta == theta_of(rec.z)
        z_sq = norm_sq(rec.z)
        t = rec.alpha * rec.alpha * z_sq * min(Fraction(1), Fraction(rec.d_sq, rec.q * rec.q))
        assert t / 4 <= rec.beta * rec.beta <= t
        assert rec.a_eff_sq == rec.alpha**2 * rec.d_sq * z_sq
        assert rec.b_eff_sq == rec.beta**2 * rec.d_sq


def test_run_trace_deterministic():
    a = run_trace(SEED, LogOmega(), 3)
    b = run_trace(SEED, LogOmega(), 3)
    assert a.steps == b.steps and a.tip == b.tip


def test_forbidden_relations_canonical():
    rels = forbidden_relations(2)
    assert len(rels) == ((2 * 2 + 1) ** 3 - 1) // 2
    seen = set()
    for m in rels:
        first = next(c for c in m.coords() if c != 0)
        assert first > 0
        assert max(abs(c) for c in m.coords()) <= 2
        seen.add(m.coords())
    assert len(seen) == len(rels)
    assert all((-m).coords() not in seen for m in rels)
    assert forbidden_relations(0) == []
    with pytest.raises(NegativeBound):
        forbidden_relations(-1)


def test_certificates(trace5):
    cert = certify_independence(trace5, IVec3(0, 0, 1))
    assert isinstance(cert, Certificate)
    th = trace5.theta_at(cert.nu)
    value = abs(Fraction(0) + 0 * th[0] + 1 * th[1])
    assert cert.margin == value - trace5.tail(cert.nu)
    assert cert.margin > 0
    # scaling a relation scales value and weight alike
    rng = random.Random(63)
    for _ in range(20):
        m = IVec3(rng.randint(-4, 4), rng.randint(-4, 4), rng.randint(-4, 4))
        if m.is_zero():
            continue
        got = certify_independence(trace5, m)
        doubled = certify_independence(trace5, m.scale(2))
        assert (got is None) == (doubled is None)
        if got is not None:
            assert doubled.nu == got.nu and doubled.margin == 2 * got.margin
    with pytest.raises(ZeroVector):
        certify_independence(trace5, IVec3(0, 0, 0))


def test_uncertified_relation(trace10):
    # the plane through the seed line is never left far enough to certify
    assert certify_independence(trace10, IVec3(1, -1, 2)) is None
    assert certify_independence(trace10, IVec3(0, 0, 1)) is not None


def fake_trace(flags):
    records = [
        StepRecord(
            nu=i + 1,
            z=IVec3(1, 1, 0),
            q=1,
            N=IVec3(0, 0, 1),
            d_sq=1,
            zp=IVec3(0, 0, 1),
            alpha=Fraction(1, 2),
            beta=Fraction(1, 2),
            t_shift=Fraction(1),
            theta=(Fraction(1), Fraction(0)),
            contraction=Fraction(0),
            det_bound_ok=ok,
        )
        for i, ok in enumerate(flags)
    ]
    trace = Trace(omega=LogOmega(), seed=SEED)
    trace.steps = records
    return trace


def test_nu0_suffix_logic():
    assert fake_trace([]).nu0 is None
    assert fake_trace([True]).nu0 == 1
    assert fake_trace([True, True]).nu0 == 1
    assert fake_trace([False, True]).nu0 == 2
    assert fake_trace([True, False]).nu0 is None
    assert fake_trace([True, False, True, True]).nu0 == 3
