"""Canonical JSON encoding for traces, witness reports, and transcripts.

All integers are encoded as decimal strings (the coordinates grow to
thousands of digits, beyond what consumers of plain JSON numbers parse
exactly), fractions as {"num", "den"} pairs of such strings, and integer
vectors as three-string arrays.  Encoding is deterministic: key order is
fixed by construction and the text ends with a newline, so reruns are
byte-identical and diffable.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .construct import StepRecord, Trace
from .games import GameConfig, Move, Transcript
from .omega import parse_omega
from .vectors import IVec3
from .verify import WitnessReport

TRACE_FORMAT = "badline-trace-1"


def enc_int(n: int) -> str:
    return str(n)


def dec_int(raw: Any) -> int:
    if not isinstance(raw, str):
        raise ValueError(f"expected a decimal string, got {type(raw).__name__}")
    return int(raw)


def enc_fraction(f: Fraction) -> dict[str, str]:
    return {"num": str(f.numerator), "den": str(f.denominator)}


def dec_fraction(raw: Any) -> Fraction:
    if not isinstance(raw, dict) or set(raw) != {"num", "den"}:
        raise ValueError(f"malformed fraction {raw!r}")
    return Fraction(dec_int(raw["num"]), dec_int(raw["den"]))


def enc_ivec(v: IVec3) -> list[str]:
    return [str(v.x0), str(v.x1), str(v.x2)]


def dec_ivec(raw: Any) -> IVec3:
    if not isinstance(raw, list) or len(raw) != 3:
        raise ValueError(f"malformed integer vector {raw!r}")
    return IVec3(dec_int(raw[0]), dec_int(raw[1]), dec_int(raw[2]))


def enc_qvec2(p: tuple[Fraction, Fraction]) -> list[dict[str, str]]:
    return [enc_fraction(p[0]), enc_fraction(p[1])]


def dec_qvec2(raw: Any) -> tuple[Fraction, Fraction]:
    if not isinstance(raw, list) or len(raw) != 2:
        raise ValueError(f"malformed plane point {raw!r}")
    return (dec_fraction(raw[0]), dec_fraction(raw[1]))


def dumps(obj: Any) -> str:
    """Stable JSON text: fixed key order, one-space indent, newline end."""
    return json.dumps(obj, indent=1) + "\n"


def _step_to_dict(rec: StepRecord) -> dict[str, Any]:
    return {
        "nu": rec.nu,
        "z": enc_ivec(rec.z),
        "q": enc_int(rec.q),
        "N": enc_ivec(rec.N),
        "d_sq": enc_int(rec.d_sq),
        "zp": enc_ivec(rec.zp),
        "alpha": enc_fraction(rec.alpha),
        "beta": enc_fraction(rec.beta),
        "t_shift": enc_fraction(rec.t_shift),
        "theta": enc_qvec2(rec.theta),
        "contraction": enc_fraction(rec.contraction),
        "det_bound_ok": rec.det_bound_ok,
    }


def _step_from_dict(raw: dict[str, Any]) -> StepRecord:
    return StepRecord(
        nu=int(raw["nu"]),
        z=dec_ivec(raw["z"]),
        q=dec_int(raw["q"]),
        N=dec_ivec(raw["N"]),
        d_sq=dec_int(raw["d_sq"]),
        zp=dec_ivec(raw["zp"]),
        alpha=dec_fraction(raw["alpha"]),
        beta=dec_fraction(raw["beta"]),
        t_shift=dec_fraction(raw["t_shift"]),
        theta=dec_qvec2(raw["theta"]),
        contraction=dec_fraction(raw["contraction"]),
        det_bound_ok=bool(raw["det_bound_ok"]),
    )


def trace_to_dict(trace: Trace) -> dict[str, Any]:
    return {
        "format": TRACE_FORMAT,
        "omega": trace.omega.label,
        "seed": [enc_ivec(trace.seed[0]), enc_ivec(trace.seed[1])],
        "eps0": enc_fraction(trace.eps0),
        "forbidden_checked": trace.forbidden_checked,
        "steps": [_step_to_dict(rec) for rec in trace.steps],
        "tip": enc_ivec(trace.tip),
        "nu0": trace.nu0,
    }


def trace_from_dict(raw: dict[str, Any]) -> Trace:
    """Rebuild a trace, checking structure and cheap consistency only.

    Deep validation (chain identities, replayed choices) is the job of
    replay_invariants; this loader rejects malformed documents and nu0
    mismatches, which suffice to catch truncation and field tampering.
    """
    if raw.get("format") != TRACE_FORMAT:
        raise ValueError(f"unsupported trace format {raw.get('format')!r}")
    trace = Trace(
        omega=parse_omega(raw["omega"]),
        seed=(dec_ivec(raw["seed"][0]), dec_ivec(raw["seed"][1])),
        eps0=dec_fraction(raw["eps0"]),
        forbidden_checked=int(raw["forbidden_checked"]),
        steps=[_step_from_dict(s) for s in raw["steps"]],
        tip=dec_ivec(raw["tip"]),
    )
    for offset, rec in enumerate(trace.steps, start=1):
        if rec.nu != offset:
            raise ValueError(f"step {offset} carries index {rec.nu}")
    if raw.get("nu0") != trace.nu0:
        raise ValueError("stored nu0 disagrees with the step flags")
    return trace


def dump_trace(trace: Trace, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(trace_to_dict(trace)))


def load_trace(path: str) -> Trace:
    with open(path, encoding="utf-8") as fh:
        return trace_from_dict(json.load(fh))


def witness_to_dict(rep: WitnessReport) -> dict[str, Any]:
    return {
        "eta": enc_qvec2(rep.eta),
        "nu": rep.nu,
        "eta_line": enc_qvec2(rep.eta_line),
        "y": enc_ivec(rep.y),
        "x": enc_int(rep.x),
        "err_hi": enc_fraction(rep.err_hi),
        "err_lo": enc_fraction(rep.err_lo),
        "bound": enc_fraction(rep.bound),
        "pass": rep.passed,
        "nonzero_certified": rep.nonzero_certified,
    }


def transcript_to_dict(transcript: Transcript) -> dict[str, Any]:
    cfg = transcript.config
    return {
        "kind": cfg.kind,
        "alpha": enc_fraction(cfg.alpha) if cfg.alpha is not None else None,
        "beta": enc_fraction(cfg.beta),
        "arena": [enc_fraction(cfg.arena[0]), enc_fraction(cfg.arena[1])],
        "rounds": cfg.rounds,
        "moves": [
            {"role": m.role, "lo": enc_fraction(m.lo), "hi": enc_fraction(m.hi)}
            for m in transcript.moves
        ],
        "final": (
            [enc_fraction(transcript.final[0]), enc_fraction(transcript.final[1])]
            if transcript.final is not None
            else None
        ),
        "forfeit": (
            {"player": transcript.forfeit[0], "reason": transcript.forfeit[1]}
            if transcript.forfeit is not None
            else None
        ),
    }


def transcript_from_dict(raw: dict[str, Any]) -> Transcript:
    cfg = GameConfig(
        kind=raw["kind"],
        beta=dec_fraction(raw["beta"]),
        alpha=dec_fraction(raw["alpha"]) if raw.get("alpha") is not None else None,
        arena=(dec_fraction(raw["arena"][0]), dec_fraction(raw["arena"][1])),
        rounds=int(raw["rounds"]),
    )
    transcript = Transcript(
        config=cfg,
        moves=[
            Move(role=m["role"], lo=dec_fraction(m["lo"]), hi=dec_fraction(m["hi"]))
            for m in raw["moves"]
        ],
    )
    if raw.get("final") is not None:
        transcript.final = (
            dec_fraction(raw["final"][0]),
            dec_fraction(raw["final"][1]),
        )
    if raw.get("forfeit") is not None:
        transcript.forfeit = (raw["forfeit"]["player"], raw["forfeit"]["reason"])
    return transcript
