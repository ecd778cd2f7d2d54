"""Command-line flows: artifacts, manifests, exit codes, determinism."""

import hashlib
import json
import shutil
import subprocess

import pytest

from badline.cli import main
from badline.jsonio import load_trace


@pytest.fixture(scope="module")
def trace_file(tmp_path_factory):
    """A four-step trace built once through the CLI itself."""
    path = tmp_path_factory.mktemp("cli") / "trace.json"
    assert main(["construct", "--steps", "4", "--out", str(path)]) == 0
    return path


def read_manifest(primary):
    side = primary.with_name(primary.name + ".manifest.json")
    return json.loads(side.read_text(encoding="utf-8"))


def test_construct_artifacts(trace_file):
    trace = load_trace(str(trace_file))
    assert len(trace.steps) == 4
    assert trace.last_index == 5
    manifest = read_manifest(trace_file)
    assert manifest["command"] == "construct"
    assert manifest["parameters"]["steps"] == 4
    assert manifest["parameters"]["omega"] == "log"
    assert manifest["inputs"] == {}
    digest = hashlib.sha256(trace_file.read_bytes()).hexdigest()
    assert manifest["outputs"] == {str(trace_file): digest}
    assert manifest["versions"]["badline"]
    assert manifest["wall_time_s"] >= 0


def test_construct_rerun_is_byte_identical(trace_file, tmp_path):
    again = tmp_path / "again.json"
    assert main(["construct", "--steps", "4", "--out", str(again)]) == 0
    assert again.read_bytes() == trace_file.read_bytes()


def test_construct_rejects_bad_input(tmp_path, capsys):
    out = str(tmp_path / "t.json")
    assert main(["construct", "--steps", "0", "--out", out]) == 2
    assert main(["construct", "--seed", "1,0,0", "--steps", "1", "--out", out]) == 2
    assert main(["construct", "--omega", "cubic", "--steps", "1", "--out", out]) == 2
    # a non-primitive seed pair fails inside the library, still exit 2
    assert main(["construct", "--seed", "2,0,0:2,2,0", "--steps", "1", "--out", out]) == 2
    lines = [ln for ln in capsys.readouterr().err.splitlines() if ln]
    assert len(lines) == 4
    for line in lines:
        payload = json.loads(line)
        assert set(payload) == {"error", "message"}


def test_verify_artifacts_and_exit(trace_file, tmp_path):
    report = tmp_path / "report.csv"
    argv = ["verify", "--trace", str(trace_file), "--samples", "2",
            "--report", str(report)]
    rc = main(argv)
    witnesses = json.loads(
        (tmp_path / "report.csv.witnesses.json").read_text(encoding="utf-8")
    )
    # two samples, two stages (nu = 3, 4); exit mirrors the pass column
    assert len(witnesses) == 4
    assert {w["sample"] for w in witnesses} == {0, 1}
    assert {w["nu"] for w in witnesses} == {3, 4}
    assert rc == (0 if all(w["pass"] for w in witnesses) else 1)
    assert rc == 1

    assert report.read_text(encoding="utf-8").startswith("nu,")
    badstat = (tmp_path / "report.csv.badstat.csv").read_text(encoding="utf-8")
    rows = badstat.splitlines()
    assert rows[0] == "sample,nu,x_err_sq_min"
    assert len(rows) == 5

    manifest = read_manifest(report)
    assert manifest["command"] == "verify"
    assert manifest["parameters"]["nu_max"] == 4
    assert manifest["parameters"]["truncated"] is False
    assert str(trace_file) in manifest["inputs"]
    assert len(manifest["outputs"]) == 3

    # rerunning reproduces every artifact byte for byte
    report2 = tmp_path / "report2.csv"
    assert main(["verify", "--trace", str(trace_file), "--samples", "2",
                 "--report", str(report2)]) == rc
    assert report2.read_bytes() == report.read_bytes()
    assert (tmp_path / "report2.csv.witnesses.json").read_bytes() == (
        tmp_path / "report.csv.witnesses.json"
    ).read_bytes()
    assert (tmp_path / "report2.csv.badstat.csv").read_bytes() == (
        tmp_path / "report.csv.badstat.csv"
    ).read_bytes()


def test_verify_rejects_bad_input(trace_file, tmp_path, capsys):
    report = str(tmp_path / "r.csv")
    missing = str(tmp_path / "nope.json")
    assert main(["verify", "--trace", missing, "--report", report]) == 2
    assert main(["verify", "--trace", str(trace_file), "--nu-min", "9",
                 "--report", report]) == 2
    assert main(["verify", "--trace", str(trace_file), "--samples", "0",
                 "--report", report]) == 2

    # stored nu0 tampering is caught at load time
    doc = json.loads(trace_file.read_text(encoding="utf-8"))
    doc["nu0"] = 3
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["verify", "--trace", str(bad), "--report", report]) == 2
    capsys.readouterr()


def test_depcase_table(tmp_path):
    out = tmp_path / "pell.csv"
    rc = main(["depcase", "--relation=-1,1,1", "--theta1", "sqrt:2",
               "--eta=-1/2,-1/2", "--nu-max", "6", "--out", str(out)])
    assert rc == 0
    rows = out.read_text(encoding="utf-8").splitlines()
    assert rows[0] == "nu,x,y0,y1,y2,err_hi,err_lo,bound,pass"
    table = [r.split(",") for r in rows[1:]]
    assert [int(r[0]) for r in table] == [2, 3, 4, 5, 6]
    assert [int(r[1]) for r in table] == [1, 4, 6, 23, 35]
    assert all(r[8] == "True" for r in table)
    manifest = read_manifest(out)
    assert manifest["command"] == "depcase"
    assert manifest["parameters"]["theta1"] == "sqrt:2"


def test_depcase_rejects_bad_input(tmp_path, capsys):
    out = str(tmp_path / "d.csv")
    assert main(["depcase", "--relation=0,2,4", "--theta1", "sqrt:2",
                 "--eta=-1/2,-1/2", "--out", out]) == 2
    assert main(["depcase", "--relation=-1,1,1", "--theta1", "sqrt:2",
                 "--eta=0,1/3", "--out", out]) == 2
    assert main(["depcase", "--relation=-1,1,1", "--theta1", "sqrt:2",
                 "--eta=-1/2,-1/2", "--nu-max", "1", "--out", out]) == 2
    assert main(["depcase", "--relation=-1,1,1", "--theta1", "sqrt:-2",
                 "--eta=-1/2,-1/2", "--out", out]) == 2
    capsys.readouterr()


def test_game_cli(tmp_path):
    out = tmp_path / "t.json"
    rc = main(["game", "--kind", "schmidt:1/2,1/3", "--rounds", "2",
               "--strategies", "left,mid", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["kind"] == "schmidt"
    assert len(doc["moves"]) == 4
    assert doc["forfeit"] is None
    manifest = read_manifest(out)
    assert manifest["parameters"]["rounds"] == 2

    other = tmp_path / "a.json"
    assert main(["game", "--kind", "absolute:1/5", "--out", str(other)]) == 0
    assert json.loads(other.read_text(encoding="utf-8"))["alpha"] is None


def test_game_rejects_bad_input(tmp_path, capsys):
    out = str(tmp_path / "g.json")
    assert main(["game", "--kind", "absolute:2/5", "--out", out]) == 2
    assert main(["game", "--kind", "poker:1/2", "--out", out]) == 2
    assert main(["game", "--kind", "schmidt:1/2", "--out", out]) == 2
    assert main(["game", "--kind", "schmidt:1/2,1/2", "--strategies", "left",
                 "--out", out]) == 2
    assert main(["game", "--kind", "schmidt:1/2,1/2", "--strategies",
                 "left,warp", "--out", out]) == 2
    payloads = [json.loads(ln) for ln in capsys.readouterr().err.splitlines() if ln]
    assert len(payloads) == 5


def test_missing_required_flag_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2


def test_console_script_runs(tmp_path):
    exe = shutil.which("badline")
    assert exe, "console script should be on PATH after install"
    out = tmp_path / "t.json"
    proc = subprocess.run(
        [exe, "game", "--kind", "absolute:1/6", "--rounds", "1",
         "--out", str(out)],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
