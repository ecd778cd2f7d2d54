"""Canonical JSON encoding: exactness, determinism, corruption checks."""

import json
from fractions import Fraction

import pytest

from badline import GameConfig, StrategyError, make_strategy, play
from badline.games import ABSOLUTE, SCHMIDT
from badline.jsonio import (
    TRACE_FORMAT,
    dec_fraction,
    dec_int,
    dec_ivec,
    dec_qvec2,
    dump_trace,
    dumps,
    enc_fraction,
    enc_int,
    enc_ivec,
    load_trace,
    trace_from_dict,
    trace_to_dict,
    transcript_from_dict,
    transcript_to_dict,
    witness_to_dict,
)
from badline.vectors import IVec3
from badline.verify import WitnessReport


def test_scalar_round_trips():
    for n in (0, 7, -13, 10**40):
        assert dec_int(enc_int(n)) == n
    f = Fraction(-355, 113)
    assert enc_fraction(f) == {"num": "-355", "den": "113"}
    assert dec_fraction(enc_fraction(f)) == f
    v = IVec3(3, -1, 10**30)
    assert dec_ivec(enc_ivec(v)) == v


def test_decoders_reject_plain_json_numbers():
    with pytest.raises(ValueError):
        dec_int(5)
    with pytest.raises(ValueError):
        dec_fraction({"num": "1"})
    with pytest.raises(ValueError):
        dec_fraction({"num": "1", "den": "2", "sign": "+"})
    with pytest.raises(ValueError):
        dec_ivec(["1", "2"])
    with pytest.raises(ValueError):
        dec_qvec2([enc_fraction(Fraction(1))])


def test_huge_integers_survive_the_text_layer():
    # coordinates reach thousands of digits; strings dodge float parsing
    n = int("123456789" * 600)
    assert len(str(n)) == 5400
    blob = dumps({"x": enc_int(n), "f": enc_fraction(Fraction(n, n + 1))})
    raw = json.loads(blob)
    assert dec_int(raw["x"]) == n
    assert dec_fraction(raw["f"]) == Fraction(n, n + 1)


def test_dumps_is_deterministic():
    doc = {"b": "2", "a": "1", "nested": [{"k": "3"}]}
    one, two = dumps(doc), dumps(dict(doc))
    assert one == two
    assert one.endswith("\n")


def test_trace_round_trip(trace5, tmp_path):
    doc = trace_to_dict(trace5)
    assert doc["format"] == TRACE_FORMAT
    assert doc["omega"] == "log"
    assert len(doc["steps"]) == 5
    back = trace_from_dict(json.loads(dumps(doc)))
    assert back == trace5
    assert back.nu0 == trace5.nu0

    path = tmp_path / "trace.json"
    dump_trace(trace5, str(path))
    assert path.read_text(encoding="utf-8") == dumps(doc)
    dump_trace(trace5, str(tmp_path / "again.json"))
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()
    assert load_trace(str(path)) == trace5


def test_trace_corruption_is_rejected(trace5):
    doc = trace_to_dict(trace5)

    bad = json.loads(dumps(doc))
    bad["format"] = "badline-trace-0"
    with pytest.raises(ValueError, match="unsupported trace format"):
        trace_from_dict(bad)

    bad = json.loads(dumps(doc))
    bad["steps"][1]["nu"] = 5
    with pytest.raises(ValueError, match="carries index"):
        trace_from_dict(bad)

    bad = json.loads(dumps(doc))
    del bad["steps"][2]
    with pytest.raises(ValueError, match="carries index"):
        trace_from_dict(bad)

    # a truncated suffix keeps indices consistent but flips nu0
    bad = json.loads(dumps(doc))
    bad["steps"] = bad["steps"][:1]
    with pytest.raises(ValueError, match="nu0 disagrees"):
        trace_from_dict(bad)

    bad = json.loads(dumps(doc))
    bad["steps"][0]["z"] = ["1", "0"]
    with pytest.raises(ValueError, match="malformed integer vector"):
        trace_from_dict(bad)


def test_witness_dict_shape():
    rep = WitnessReport(
        eta=(Fraction(3, 5), Fraction(4, 5)),
        nu=3,
        eta_line=(Fraction(3, 5), Fraction(4, 5)),
        y=IVec3(386, 233, 315),
        x=385,
        err_hi=Fraction(1, 2),
        err_lo=Fraction(0),
        bound=Fraction(1, 55),
        passed=False,
        nonzero_certified=True,
    )
    doc = witness_to_dict(rep)
    assert list(doc) == [
        "eta", "nu", "eta_line", "y", "x",
        "err_hi", "err_lo", "bound", "pass", "nonzero_certified",
    ]
    # the JSON field is named "pass"; the dataclass avoids the keyword
    assert doc["pass"] is False
    assert doc["nonzero_certified"] is True
    assert doc["x"] == "385"
    assert doc["err_hi"] == {"num": "1", "den": "2"}
    assert json.loads(dumps(doc))["pass"] is False


def test_transcript_round_trip():
    cfg = GameConfig(kind=SCHMIDT, beta=Fraction(1, 2), alpha=Fraction(1, 3), rounds=2)
    out = play(cfg, make_strategy("B", "left"), make_strategy("A", "mid"))
    doc = transcript_to_dict(out)
    assert doc["kind"] == "schmidt"
    assert len(doc["moves"]) == 4
    back = transcript_from_dict(json.loads(dumps(doc)))
    assert back == out
    assert dumps(transcript_to_dict(back)) == dumps(doc)


def test_forfeited_transcript_round_trip():
    def raiser(cfg, history):
        raise StrategyError("out of ideas")

    cfg = GameConfig(kind=ABSOLUTE, beta=Fraction(1, 5), rounds=3)
    out = play(cfg, make_strategy("B", "mid"), raiser)
    assert out.forfeit is not None
    doc = transcript_to_dict(out)
    assert doc["alpha"] is None
    assert doc["forfeit"] == {"player": "A", "reason": "strategy failed: out of ideas"}
    back = transcript_from_dict(json.loads(dumps(doc)))
    assert back == out
