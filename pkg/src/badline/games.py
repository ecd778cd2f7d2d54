"""Finite-round interval games: the alpha-beta game and the absolute game.

Both games alternate B-moves and A-moves on a closed rational interval.
In the alpha-beta kind the moves nest (B1 contains A1 contains B2 ...)
with exact size ratios |A_i| = alpha |B_i| and |B_{i+1}| = beta |A_i|.
In the absolute kind the A-move deletes an interval of size at most
beta |B_i| and the next B-ball must avoid the deleted part while keeping
size at least beta |B_i|.  The simulator validates plays and reports
outcomes; it never decides who wins a set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import StrategyError

SCHMIDT = "schmidt"
ABSOLUTE = "absolute"


@dataclass(frozen=True)
class Move:
    """One interval put down by a player; role "B" is a ball, "A" is the
    opponent ball in the alpha-beta kind and the deleted interval in the
    absolute kind."""

    role: str
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.role not in ("A", "B"):
            raise ValueError(f"unknown role {self.role!r}")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, other: "Move") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


@dataclass(frozen=True)
class GameConfig:
    """Game kind with its ratios, the arena interval, and the round count.

    alpha is only meaningful for the alpha-beta kind; the absolute kind
    ignores it and restricts beta to (0, 1/3).
    """

    kind: str
    beta: Fraction
    alpha: Optional[Fraction] = None
    arena: tuple[Fraction, Fraction] = (Fraction(0), Fraction(1))
    rounds: int = 1

    def __post_init__(self) -> None:
        if self.kind not in (SCHMIDT, ABSOLUTE):
            raise ValueError(f"unknown game kind {self.kind!r}")
        if self.kind == SCHMIDT:
            if self.alpha is None or not 0 < self.alpha < 1:
                raise ValueError("alpha must lie in (0, 1)")
            if not 0 < self.beta < 1:
                raise ValueError("beta must lie in (0, 1)")
        else:
            if self.alpha is not None:
                raise ValueError("absolute game takes no alpha")
            if not 0 < self.beta < Fraction(1, 3):
                raise ValueError("beta must lie in (0, 1/3)")
        if self.arena[0] >= self.arena[1]:
            raise ValueError("arena must have positive length")
        if self.rounds < 1:
            raise ValueError("need at least one round")

    @property
    def arena_length(self) -> Fraction:
        return self.arena[1] - self.arena[0]


@dataclass(frozen=True)
class Violation:
    """A named rule breach: which constraint failed and how."""

    constraint: str
    detail: str


@dataclass
class Transcript:
    """Alternating move list plus the final surviving interval.

    forfeit records the offending player and reason when a strategy broke
    a rule or raised; the final interval is then the last legal B-ball.
    """

    config: GameConfig
    moves: list[Move] = field(default_factory=list)
    final: Optional[tuple[Fraction, Fraction]] = None
    forfeit: Optional[tuple[str, str]] = None


Strategy = Callable[[GameConfig, list[Move]], Move]


def _expected_role(history: list[Move]) -> str:
    return "B" if len(history) % 2 == 0 else "A"


def validate_move(cfg: GameConfig, history: list[Move], mv: Move) -> Optional[Violation]:
    """Exact rational validation of one pending move; None means legal."""
    role = _expected_role(history)
    if mv.role != role:
        return Violation("turn-order", f"expected a {role}-move")
    if mv.lo >= mv.hi:
        return Violation("degenerate", "intervals must have positive length")
    if not history:
        arena = Move("B", cfg.arena[0], cfg.arena[1])
        if not arena.contains(mv):
            return Violation("containment", "first ball must lie in the arena")
        return None
    last = history[-1]
    if cfg.kind == SCHMIDT:
        if not last.contains(mv):
            return Violation("containment", "move must nest inside the previous ball")
        ratio = cfg.alpha if role == "A" else cfg.beta
        if mv.length != ratio * last.length:
            return Violation(
                f"size-{'alpha' if role == 'A' else 'beta'}",
                f"length must be exactly {ratio} times the previous ball's",
            )
        return None
    if role == "A":
        if mv.length > cfg.beta * last.length:
            return Violation("size-delete", "deleted interval exceeds beta fraction")
        return None
    ball = history[-2]
    deleted = history[-1]
    if not ball.contains(mv):
        return Violation("containment", "ball must stay inside the previous ball")
    if mv.lo < deleted.hi and deleted.lo < mv.hi:
        return Violation("avoidance", "ball overlaps the deleted interval")
    if mv.length < cfg.beta * ball.length:
        return Violation("size-beta", "ball shrank below the beta fraction")
    return None


def play(cfg: GameConfig, strat_b: Strategy, strat_a: Strategy) -> Transcript:
    """Run the configured number of validated rounds.

    Each round is one B-move and one A-move.  A strategy that raises or
    breaks a rule forfeits; the transcript records who and why, keeping
    the moves played so far.
    """
    transcript = Transcript(config=cfg)
    for turn in range(2 * cfg.rounds):
        role = _expected_role(transcript.moves)
        strat = strat_b if role == "B" else strat_a
        try:
            mv = strat(cfg, list(transcript.moves))
        except StrategyError as exc:
            transcript.forfeit = (role, f"strategy failed: {exc}")
            break
        violation = validate_move(cfg, transcript.moves, mv)
        if violation is not None:
            transcript.forfeit = (role, f"{violation.constraint}: {violation.detail}")
            break
        transcript.moves.append(mv)
    survivors = [m for m in transcript.moves if m.role == _final_role(cfg)]
    if survivors:
        transcript.final = (survivors[-1].lo, survivors[-1].hi)
    return transcript


def _final_role(cfg: GameConfig) -> str:
    # nesting makes the last A-ball innermost; in the absolute kind the
    # A-intervals are deletions, so the surviving interval is a B-ball
    return "A" if cfg.kind == SCHMIDT else "B"


def replay_transcript(cfg: GameConfig, moves: list[Move]) -> Optional[Violation]:
    """Re-validate a whole move list from scratch; None means all legal."""
    history: list[Move] = []
    for mv in moves:
        violation = validate_move(cfg, history, mv)
        if violation is not None:
            return violation
        history.append(mv)
    return None


def shrink_after(cfg: GameConfig, n: int) -> Fraction:
    """Exact diameter floor of the n-th B-ball when B1 fills the arena.

    The alpha-beta rules force |B_n| = |B_1| (alpha beta)^(n-1) exactly;
    the absolute rules only bound it below by |B_1| beta^(n-1).
    """
    if n < 1:
        raise ValueError("ball index starts at 1")
    if cfg.kind == SCHMIDT:
        step = cfg.alpha * cfg.beta
    else:
        step = cfg.beta
    return cfg.arena_length * step ** (n - 1)


def _sub_interval(
    lo: Fraction, hi: Fraction, length: Fraction, target: Optional[Fraction]
) -> tuple[Fraction, Fraction]:
    """Subinterval of [lo, hi] of the given length, centered on target
    when possible (clamped), flush left otherwise."""
    if target is None:
        return lo, lo + length
    start = target - length / 2
    start = max(lo, min(start, hi - length))
    return start, start + length


def make_strategy(role: str, name: str) -> Strategy:
    """Built-in deterministic strategies.

    "left" always plays flush left; "mid" centers; "target:P" steers to
    keep the rational point P inside (B) or to delete around P (absolute
    A).  Unknown names raise StrategyError at lookup time.
    """
    target: Optional[Fraction] = None
    if name.startswith("target:"):
        target = Fraction(name.split(":", 1)[1])
        name = "target"
    if name not in ("left", "mid", "target"):
        raise StrategyError(f"unknown strategy {name!r}")

    def pick(cfg: GameConfig, history: list[Move]) -> Move:
        mv_role = _expected_role(history)
        if mv_role != role:
            raise StrategyError(f"strategy for {role} asked to move as {mv_role}")
        goal = target
        if name == "mid":
            goal = None
        if not history:
            length = cfg.arena_length
            lo, hi = cfg.arena if name != "target" else _sub_interval(
                cfg.arena[0], cfg.arena[1], length, goal
            )
            return Move("B", lo, hi)
        last = history[-1]
        if cfg.kind == SCHMIDT:
            ratio = cfg.alpha if mv_role == "A" else cfg.beta
            length = ratio * last.length
            if name == "mid":
                goal = (last.lo + last.hi) / 2
            lo, hi = _sub_interval(last.lo, last.hi, length, goal)
            return Move(mv_role, lo, hi)
        if mv_role == "A":
            length = cfg.beta * last.length
            if name == "mid":
                goal = (last.lo + last.hi) / 2
            lo, hi = _sub_interval(last.lo, last.hi, length, goal)
            return Move("A", lo, hi)
        ball, deleted = history[-2], history[-1]
        length = cfg.beta * ball.length
        if name == "mid":
            goal = (ball.lo + ball.hi) / 2
        # the deletion splits the ball into at most two admissible pieces;
        # prefer the one that can hold the goal, then the longer one
        pieces = []
        left = (ball.lo, min(ball.hi, deleted.lo))
        right = (max(ball.lo, deleted.hi), ball.hi)
        for piece in (left, right):
            if piece[1] - piece[0] >= length:
                pieces.append(piece)
        if not pieces:
            raise StrategyError("no room left beside the deleted interval")
        if goal is not None:
            holding = [p for p in pieces if p[0] <= goal <= p[1]]
            if holding:
                pieces = holding
        pieces.sort(key=lambda p: (p[0] - p[1], p[0]))
        lo, hi = _sub_interval(pieces[0][0], pieces[0][1], length, goal)
        return Move("B", lo, hi)

    return pick
