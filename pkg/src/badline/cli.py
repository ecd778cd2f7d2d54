"""Command-line front end: reproducible runs with JSON/CSV artifacts.

Four subcommands cover the pipeline: construct builds and saves a trace,
verify samples the final line and hunts witnesses, depcase produces the
one-relation witness table, and game plays a validated interval game.
Every run writes a manifest (flags, input/output hashes, versions, wall
time) next to its primary output.  Exit codes: 0 success, 1 a check
failed, 2 bad input.  Errors print one JSON object per line to stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .construct import run_trace
from .depcase import DependentInstance, chebyshev_witnesses
from .errors import BadlineError, PrecisionExhausted, StepFailed, StrategyError
from .games import GameConfig, make_strategy, play
from .jsonio import dump_trace, dumps, load_trace, transcript_to_dict, witness_to_dict
from .omega import parse_omega
from .oracles import AffineOracle, RationalOracle, SqrtOracle
from .rationals import sqrt_lower
from .vectors import IVec3
from .verify import asymptotics_report, bad_statistic, find_witness, segment_samples


class _InputError(Exception):
    """Bad user input distinguished from genuine check failures."""


def _emit_error(exc: BaseException) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(
    primary: str,
    command: str,
    parameters: dict,
    inputs: Sequence[str],
    outputs: Sequence[str],
    started: float,
) -> None:
    manifest = {
        "command": command,
        "parameters": parameters,
        "inputs": {path: _sha256(path) for path in inputs},
        "outputs": {path: _sha256(path) for path in outputs},
        "versions": {"badline": __version__, "python": sys.version.split()[0]},
        "wall_time_s": round(time.monotonic() - started, 3),
    }
    with open(primary + ".manifest.json", "w", encoding="utf-8") as fh:
        fh.write(dumps(manifest))


def _parse_ivec(raw: str) -> IVec3:
    parts = raw.split(",")
    if len(parts) != 3:
        raise _InputError(f"expected three comma-separated integers, got {raw!r}")
    try:
        return IVec3(int(parts[0]), int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise _InputError(str(exc)) from None


def _parse_seed(raw: str) -> tuple[IVec3, IVec3]:
    parts = raw.split(":")
    if len(parts) != 2:
        raise _InputError("seed must be two integer triples joined by ':'")
    return _parse_ivec(parts[0]), _parse_ivec(parts[1])


def _parse_fraction(raw: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise _InputError(f"bad rational {raw!r}: {exc}") from None


def _parse_eta(raw: str) -> tuple[Fraction, Fraction]:
    parts = raw.split(",")
    if len(parts) != 2:
        raise _InputError("eta must be two comma-separated rationals")
    return _parse_fraction(parts[0]), _parse_fraction(parts[1])


def _parse_theta1(raw: str):
    """Oracle specs: "sqrt:R" is the fractional part of sqrt(R); "rat:P/Q"
    (or a bare rational) is exact."""
    if raw.startswith("sqrt:"):
        radicand = _parse_fraction(raw.split(":", 1)[1])
        if radicand < 0:
            raise _InputError("radicand must be nonnegative")
        whole = int(sqrt_lower(radicand, 64))
        return AffineOracle(Fraction(-whole), Fraction(1), SqrtOracle(radicand))
    if raw.startswith("rat:"):
        return RationalOracle(_parse_fraction(raw.split(":", 1)[1]))
    return RationalOracle(_parse_fraction(raw))


def _cmd_construct(args: argparse.Namespace) -> int:
    started = time.monotonic()
    if args.steps < 1:
        raise _InputError("need at least one step")
    if args.indep_bound < 0:
        raise _InputError("relation bound must be nonnegative")
    seed = _parse_seed(args.seed)
    omega = parse_omega(args.omega)
    trace = run_trace(
        seed=seed, omega=omega, steps=args.steps, forbidden_bound=args.indep_bound
    )
    from .construct import replay_invariants

    problems = replay_invariants(trace)
    if problems:
        for msg in problems:
            _emit_error(StepFailed(msg))
        return 1
    dump_trace(trace, args.out)
    _write_manifest(
        args.out,
        "construct",
        {
            "omega": args.omega,
            "steps": args.steps,
            "seed": args.seed,
            "indep_bound": args.indep_bound,
        },
        inputs=[],
        outputs=[args.out],
        started=started,
    )
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    started = time.monotonic()
    try:
        trace = load_trace(args.trace)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise _InputError(f"unreadable trace: {exc}") from None
    from .construct import replay_invariants

    if replay_invariants(trace):
        raise _InputError("trace fails replay validation")
    nu_max = args.nu_max if args.nu_max is not None else trace.last_index - 1
    if not 2 <= args.nu_min <= nu_max < trace.last_index:
        raise _InputError(
            f"need 2 <= nu-min <= nu-max < {trace.last_index} for this trace"
        )
    if args.samples < 1:
        raise _InputError("need at least one sample")
    samples = segment_samples(trace, args.samples)
    witness_rows = []
    stat_rows = []
    all_passed = True
    for idx, eta in enumerate(samples):
        for nu in range(args.nu_min, nu_max + 1):
            rep = find_witness(trace, nu, eta, truncated=args.truncated)
            witness_rows.append((idx, rep))
            all_passed = all_passed and rep.passed
        for nu, stat in bad_statistic(trace, eta, args.nu_min, nu_max):
            stat_rows.append((idx, nu, stat))
    with open(args.report, "w", encoding="utf-8") as fh:
        fh.write(asymptotics_report(trace))
    witness_path = args.report + ".witnesses.json"
    with open(witness_path, "w", encoding="utf-8") as fh:
        fh.write(
            dumps(
                [
                    {"sample": idx, **witness_to_dict(rep)}
                    for idx, rep in witness_rows
                ]
            )
        )
    stat_path = args.report + ".badstat.csv"
    with open(stat_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "nu", "x_err_sq_min"])
        for idx, nu, stat in stat_rows:
            writer.writerow([idx, nu, str(stat)])
    _write_manifest(
        args.report,
        "verify",
        {
            "trace": args.trace,
            "samples": args.samples,
            "nu_min": args.nu_min,
            "nu_max": nu_max,
            "truncated": args.truncated,
        },
        inputs=[args.trace],
        outputs=[args.report, witness_path, stat_path],
        started=started,
    )
    return 0 if all_passed else 1


def _cmd_depcase(args: argparse.Namespace) -> int:
    started = time.monotonic()
    relation = _parse_ivec(args.relation)
    eta = _parse_eta(args.eta)
    if args.nu_max < 2:
        raise _InputError("nu-max must be at least 2")
    inst = DependentInstance(relation, _parse_theta1(args.theta1))
    reports = chebyshev_witnesses(inst, eta, args.nu_max)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["nu", "x", "y0", "y1", "y2", "err_hi", "err_lo", "bound", "pass"]
        )
        for rep in reports:
            writer.writerow(
                [
                    rep.nu,
                    rep.x,
                    rep.y.x0,
                    rep.y.x1,
                    rep.y.x2,
                    str(rep.err_hi),
                    str(rep.err_lo),
                    str(rep.bound),
                    rep.passed,
                ]
            )
    _write_manifest(
        args.out,
        "depcase",
        {
            "relation": args.relation,
            "theta1": args.theta1,
            "eta": args.eta,
            "nu_max": args.nu_max,
        },
        inputs=[],
        outputs=[args.out],
        started=started,
    )
    return 0 if all(rep.passed for rep in reports) else 1


def _parse_kind(raw: str) -> tuple[str, Optional[Fraction], Fraction]:
    parts = raw.split(":", 1)
    if len(parts) != 2:
        raise _InputError("kind must be schmidt:ALPHA,BETA or absolute:BETA")
    kind, params = parts
    if kind == "schmidt":
        ab = params.split(",")
        if len(ab) != 2:
            raise _InputError("schmidt kind needs alpha,beta")
        return kind, _parse_fraction(ab[0]), _parse_fraction(ab[1])
    if kind == "absolute":
        return kind, None, _parse_fraction(params)
    raise _InputError(f"unknown game kind {kind!r}")


def _cmd_game(args: argparse.Namespace) -> int:
    started = time.monotonic()
    kind, alpha, beta = _parse_kind(args.kind)
    arena_parts = args.arena.split(",")
    if len(arena_parts) != 2:
        raise _InputError("arena must be two rationals lo,hi")
    strategy_names = args.strategies.split(",")
    if len(strategy_names) != 2:
        raise _InputError("strategies must be a pair nameB,nameA")
    try:
        cfg = GameConfig(
            kind=kind,
            alpha=alpha,
            beta=beta,
            arena=(
                _parse_fraction(arena_parts[0]),
                _parse_fraction(arena_parts[1]),
            ),
            rounds=args.rounds,
        )
        strat_b = make_strategy("B", strategy_names[0])
        strat_a = make_strategy("A", strategy_names[1])
    except (ValueError, StrategyError) as exc:
        raise _InputError(str(exc)) from None
    transcript = play(cfg, strat_b, strat_a)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dumps(transcript_to_dict(transcript)))
    _write_manifest(
        args.out,
        "game",
        {
            "kind": args.kind,
            "rounds": args.rounds,
            "strategies": args.strategies,
            "arena": args.arena,
        },
        inputs=[],
        outputs=[args.out],
        started=started,
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="badline",
        description="exact construction and verification of a badly "
        "approximable point with a well-approximable line segment",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_construct = sub.add_parser("construct", help="run the construction")
    p_construct.add_argument("--omega", default="log", help="log, loglog, or pow:EPS")
    p_construct.add_argument("--steps", type=int, default=10)
    p_construct.add_argument(
        "--seed", default="1,0,0:1,1,0", help="two integer triples, ':' separated"
    )
    p_construct.add_argument("--indep-bound", type=int, default=10)
    p_construct.add_argument("--out", default="trace.json")
    p_construct.set_defaults(func=_cmd_construct)

    p_verify = sub.add_parser("verify", help="sample the final line, hunt witnesses")
    p_verify.add_argument("--trace", required=True)
    p_verify.add_argument("--samples", type=int, default=50)
    p_verify.add_argument("--nu-min", type=int, default=3)
    p_verify.add_argument("--nu-max", type=int, default=None)
    p_verify.add_argument(
        "--truncated",
        action="store_true",
        help="measure against the last theta itself (zero tail radius)",
    )
    p_verify.add_argument("--report", default="report.csv")
    p_verify.set_defaults(func=_cmd_verify)

    p_dep = sub.add_parser("depcase", help="one-relation witness table")
    p_dep.add_argument("--relation", required=True, help="integer triple z0,z1,z2")
    p_dep.add_argument(
        "--theta1", required=True, help="sqrt:R (fractional part) or rat:P/Q"
    )
    p_dep.add_argument("--eta", required=True, help="two rationals (use --eta=...)")
    p_dep.add_argument("--nu-max", type=int, default=6)
    p_dep.add_argument("--out", default="depcase.csv")
    p_dep.set_defaults(func=_cmd_depcase)

    p_game = sub.add_parser("game", help="play a validated interval game")
    p_game.add_argument(
        "--kind", required=True, help="schmidt:ALPHA,BETA or absolute:BETA"
    )
    p_game.add_argument("--rounds", type=int, default=3)
    p_game.add_argument(
        "--strategies", default="mid,left", help="B,A from left|mid|target:P"
    )
    p_game.add_argument("--arena", default="0,1", help="two rationals lo,hi")
    p_game.add_argument("--out", default="transcript.json")
    p_game.set_defaults(func=_cmd_game)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        _emit_error(exc)
        return 2
    except (StepFailed, PrecisionExhausted) as exc:
        _emit_error(exc)
        return 1
    except BadlineError as exc:
        _emit_error(exc)
        return 2
    except ValueError as exc:
        _emit_error(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
