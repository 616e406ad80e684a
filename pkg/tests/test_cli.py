import csv
import json
import os
import subprocess
import sys

import pytest

from soliton_lab import cli


def _run(tmp_path, *argv):
    out = tmp_path / "out"
    code = cli.run(["--out", str(out), *argv])
    return code, out


def _manifest(out):
    with open(out / "manifest.json") as fh:
        return json.load(fh)


def test_verify_s1(tmp_path):
    code, out = _run(tmp_path, "verify", "--family", "S1", "--a0", "1", "--b0", "1")
    assert code == 0
    rep = json.loads((out / "verify.json").read_text())["reports"][0]
    assert rep["lambda"] == -2.0 and rep["passed"]
    m = _manifest(out)
    assert m["exit_code"] == 0 and [f["path"] for f in m["files"]] == ["verify.json"]


def test_verify_detects_wrong_lambda(tmp_path):
    code, out = _run(tmp_path, "verify", "--family", "S1", "--a0", "1", "--b0", "1", "--lambda", "-1.9")
    assert code == 1
    assert _manifest(out)["exit_code"] == 1


def test_solve_ode_offset(tmp_path):
    code, out = _run(tmp_path, "solve-ode", "--star", "1,1,1", "--f0", "1", "--f2", "-1",
                     "--mode", "offset:1e-3")
    assert code == 0
    ev = json.loads((out / "events.json").read_text())
    assert ev["L1"] < 0 < ev["L2"]
    with open(out / "trajectory.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["z", "f", "f1", "f2"] and len(rows) > 10


def test_solve_theta(tmp_path):
    code, out = _run(tmp_path, "solve-ode", "--theta", "1", "--lambda", "-6", "--start", "1,1,0.1")
    assert code == 0
    with open(out / "trajectory.csv") as fh:
        assert next(csv.reader(fh)) == ["t", "f", "f1", "f2", "aux"]


@pytest.mark.parametrize("argv", [
    ["verify"],
    ["verify", "--family", "Nope"],
    ["verify", "--family", "S1", "--zz", "1"],
    ["solve-ode", "--star", "1,1", "--f0", "1", "--f2", "-1"],
    ["solve-ode", "--star", "1,1,1", "--f0", "1", "--f2", "-1", "--mode", "sideways"],
    ["length", "--family", "S1", "--curve", "spiral:1", "--from", "0", "--to", "1"],
    ["bogus"],
])
def test_usage_errors(tmp_path, argv, capsys):
    code, _ = _run(tmp_path, *argv)
    assert code == 2
    assert capsys.readouterr().err


def test_identical_runs_identical_bytes(tmp_path):
    argv = ["verify", "--family", "F_alpha", "--alpha", "0.7"]
    a = tmp_path / "a"
    b = tmp_path / "b"
    os.makedirs(a)
    os.makedirs(b)
    cwd = os.getcwd()
    try:
        for d in (a, b):
            os.chdir(d)
            assert cli.run(["--out", "run", *argv]) == 0
    finally:
        os.chdir(cwd)
    for name in ("verify.json", "manifest.json"):
        assert (a / "run" / name).read_bytes() == (b / "run" / name).read_bytes()


def test_float_format():
    assert cli.dumps(0.1) == "0.10000000000000001"
    assert cli.dumps(2.0) == "2.0"
    assert cli.dumps(float("inf")) == '"Infinity"'
    assert json.loads(cli.dumps({"a": [1, 2.5, None, True]})) == {"a": [1, 2.5, None, True]}


def test_sweep(tmp_path, monkeypatch):
    monkeypatch.setenv("SOLITON_LAB_THREADS", "2")
    manifest = tmp_path / "sweep.json"
    manifest.write_text(json.dumps([
        {"family": "S1", "ranges": {"b0": [0.5, 1.0]}},
        {"family": "Gaussian", "ranges": {"lam": {"start": 0.5, "stop": 1.0, "num": 2}}},
    ]))
    code, out = _run(tmp_path, "sweep", "--manifest", str(manifest), "--workers", "4")
    assert code == 0
    with open(out / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4 and all(r["passed"] == "True" for r in rows)
    paths = [f["path"] for f in _manifest(out)["files"]]
    assert os.path.join("sweep", "00003.json") in paths


def test_sweep_with_failures(tmp_path):
    manifest = tmp_path / "sweep.json"
    manifest.write_text(json.dumps({"family": "Gaussian", "lambda_offset": 0.1}))
    code, _ = _run(tmp_path, "sweep", "--manifest", str(manifest))
    assert code == 1


def test_classify_and_length(tmp_path):
    code, out = _run(tmp_path, "classify", "--family", "S1", "--b0", "-0.25")
    assert code == 0
    assert json.loads((out / "classify.json").read_text())["class"] == "b"
    code, out = _run(tmp_path, "length", "--family", "S1", "--c", "0", "--curve", "vertical:0",
                     "--from", "1", "--to", "inf")
    assert code == 0
    res = json.loads((out / "length.json").read_text())["result"]
    assert res["finite"] is False and res["kind"] == "log"


def test_shoot(tmp_path):
    code, out = _run(tmp_path, "shoot", "--star", "1,1,1", "--f2-range=-2,-0.5,4")
    assert code == 0
    with open(out / "shoot.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(float(r["L1"]) < 0 < float(r["L2"]) for r in rows)


def test_report_explicit(tmp_path):
    code, out = _run(tmp_path, "report", "--explicit", "--no-geometry")
    assert code == 0
    assert (out / "report.csv").exists()


def test_help_documents_csv_columns():
    res = subprocess.run([sys.executable, "-m", "soliton_lab", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "trajectory.csv" in res.stdout and "full_tensor" in res.stdout
