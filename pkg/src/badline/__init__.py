"""Exact construction of badly approximable planar points near a line.

The package builds, in exact rational arithmetic, a sequence of integer
vectors whose normalized directions converge to a point theta of the
plane while avoiding a growing family of integer relations, then studies
the rational line attached to the final construction plane: points on
that line admit unusually good inhomogeneous approximations by multiples
of theta, which is what the witness search and the game simulator
quantify.  All real-number comparisons go through directed rational
interval enclosures; nothing is ever rounded silently.
"""

import sys

# step data reaches thousands of decimal digits; every int <-> str
# conversion here is deliberate, so the interpreter's digit guard only
# breaks serialization
sys.set_int_max_str_digits(0)

from .construct import (
    Certificate,
    StepRecord,
    Trace,
    advance,
    certify_independence,
    forbidden_relations,
    replay_invariants,
    run_trace,
    theta_of,
    theta_with_tail,
)
from .depcase import (
    DependentInstance,
    best_approximations,
    chebyshev_witnesses,
    kernel_lattice,
    pell_instance,
    rational_theta_gap,
)
from .errors import (
    BadlineError,
    ConeViolation,
    Infeasible,
    NegativeBound,
    NotABasis,
    NotPrimitive,
    NotPrimitivePair,
    OffLine,
    OffPlane,
    PrecisionExhausted,
    StepFailed,
    StrategyError,
    ZeroVector,
)
from .games import GameConfig, Move, Transcript, Violation, make_strategy, play
from .games import shrink_after, validate_move
from .lattice import (
    Frame,
    LevelRect,
    PlaneLattice,
    find_point_in_level_rect,
    gauss_reduce,
    make_frame,
    ray_dist_sq,
    rect_coords,
)
from .omega import LogLogOmega, LogOmega, Omega, PowOmega, parse_omega
from .oracles import AffineOracle, Interval, RationalOracle, RealOracle, SqrtOracle
from .vectors import IVec3, QVec3
from .verify import (
    SegmentSpec,
    WitnessReport,
    asymptotics_report,
    bad_statistic,
    find_witness,
    homogeneous_report,
    segment_samples,
    segment_spec,
)

__version__ = "0.1.0"

__all__ = [
    "AffineOracle",
    "BadlineError",
    "Certificate",
    "ConeViolation",
    "DependentInstance",
    "Frame",
    "GameConfig",
    "IVec3",
    "Infeasible",
    "Interval",
    "LevelRect",
    "LogLogOmega",
    "LogOmega",
    "Move",
    "NegativeBound",
    "NotABasis",
    "NotPrimitive",
    "NotPrimitivePair",
    "OffLine",
    "OffPlane",
    "Omega",
    "PlaneLattice",
    "PowOmega",
    "PrecisionExhausted",
    "QVec3",
    "RationalOracle",
    "RealOracle",
    "SegmentSpec",
    "SqrtOracle",
    "StepFailed",
    "StepRecord",
    "StrategyError",
    "Trace",
    "Transcript",
    "Violation",
    "WitnessReport",
    "ZeroVector",
    "advance",
    "asymptotics_report",
    "bad_statistic",
    "best_approximations",
    "certify_independence",
    "chebyshev_witnesses",
    "find_point_in_level_rect",
    "find_witness",
    "forbidden_relations",
    "gauss_reduce",
    "homogeneous_report",
    "kernel_lattice",
    "make_frame",
    "make_strategy",
    "parse_omega",
    "pell_instance",
    "play",
    "rational_theta_gap",
    "ray_dist_sq",
    "rect_coords",
    "replay_invariants",
    "run_trace",
    "segment_samples",
    "segment_spec",
    "shrink_after",
    "theta_of",
    "theta_with_tail",
    "validate_move",
]
