import json
import subprocess
import sys

import pytest

from regsched import cli
from regsched.errors import NumericalFailure


@pytest.fixture
def e1_file(tmp_path):
    p = tmp_path / "e1.json"
    p.write_text(json.dumps({"name": "E1", "jobs": [
        {"id": 1, "w": 3, "d_lo": 1, "d_hi": 1},
        {"id": 2, "w": 5, "d_lo": 1, "d_hi": 2},
    ]}))
    return p


def test_solve_exact(tmp_path, e1_file):
    out = tmp_path / "s.json"
    assert cli.main(["solve", "--input", str(e1_file), "--method", "exact", "--output", str(out)]) == 0
    assert json.loads(out.read_text()) == {"order": [1, 2]}
    result = json.loads((tmp_path / "s.result.json").read_text())
    assert result["value"] == 2
    assert result["status"] == "Optimal"
    assert result["lb"] == 2


@pytest.mark.parametrize("method", ["lb", "mp", "decomp"])
def test_solve_heuristics(tmp_path, e1_file, method):
    out = tmp_path / "h.json"
    res = tmp_path / "h_result.json"
    args = ["solve", "--input", str(e1_file), "--method", method, "--output", str(out), "--result", str(res)]
    if method == "decomp":
        args += ["--blocks", "2", "--polish", "0"]
    assert cli.main(args) == 0
    assert json.loads(res.read_text())["value"] == 3


def test_solve_warm_start_and_limit(tmp_path, e1_file):
    warm = tmp_path / "w.json"
    warm.write_text('{"order": [2, 1]}')
    out = tmp_path / "s.json"
    args = ["solve", "--input", str(e1_file), "--output", str(out), "--warm-start", str(warm), "--time-limit", "0"]
    assert cli.main(args) == 0
    result = json.loads((tmp_path / "s.result.json").read_text())
    assert result["status"] == "TimeLimit"
    assert result["value"] == 3


def test_eval(tmp_path, e1_file, capsys):
    sched = tmp_path / "s.json"
    sched.write_text('{"order": [2, 1]}')
    assert cli.main(["eval", "--input", str(e1_file), "--schedule", str(sched)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["regret"] == 3
    assert report["worst_scenario"] == {"1": 1, "2": 2}


def test_export_lp(tmp_path, e1_file):
    out = tmp_path / "e1.lp"
    assert cli.main(["export-lp", "--input", str(e1_file), "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("\\ Problem: E1\nMinimize\n")
    assert text.endswith("End\n")


def test_gen_then_solve(tmp_path):
    d = tmp_path / "inst"
    assert cli.main(["gen", "--profile", "half", "--n", "6", "--seed", "10", "--count", "20", "--out", str(d)]) == 0
    files = sorted(d.iterdir())
    assert len(files) == 20
    assert (d / "half_n6_s10.json").exists() and (d / "half_n6_s29.json").exists()
    for f in files:
        out = tmp_path / (f.stem + ".sched.json")
        assert cli.main(["solve", "--input", str(f), "--method", "exact", "--output", str(out)]) == 0
        value = json.loads((tmp_path / (f.stem + ".sched.result.json")).read_text())["value"]
        assert value >= 0


def test_bench_writes_csv(tmp_path):
    out = tmp_path / "b.csv"
    args = ["bench", "--profile", "high", "--sizes", "5,6", "--reps", "2", "--methods", "exact,lb", "--workers", "1", "--out", str(out)]
    assert cli.main(args) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "profile,n,seed,method,value,time_ms,status,ub,lb,gap_pct"
    assert len(lines) == 1 + 8
    assert (tmp_path / "b.summary.csv").read_text().startswith("n,method,count,mean,std")


def test_input_errors(tmp_path, e1_file, capsys):
    out = str(tmp_path / "x.json")
    assert cli.main(["solve", "--input", str(tmp_path / "missing.json"), "--output", out]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["solve", "--input", str(bad), "--output", out]) == 2
    bad.write_text(json.dumps({"jobs": [{"id": 1, "w": 1, "d_lo": 1}]}))
    capsys.readouterr()
    assert cli.main(["solve", "--input", str(bad), "--output", out]) == 2
    assert "d_hi" in capsys.readouterr().err
    bad.write_text(json.dumps({"jobs": [{"id": 1, "w": 1, "d_lo": 0, "d_hi": 1}]}))
    assert cli.main(["solve", "--input", str(bad), "--output", out]) == 2
    assert cli.main(["solve", "--input", str(e1_file), "--method", "algoA", "--output", out]) == 2
    sched = tmp_path / "s.json"
    sched.write_text('{"order": [1, 3]}')
    assert cli.main(["eval", "--input", str(e1_file), "--schedule", str(sched)]) == 2


def test_solver_failure_exit_code(tmp_path, e1_file, monkeypatch):
    def boom(*a, **k):
        raise NumericalFailure("pivot trouble")

    monkeypatch.setattr(cli, "solve", boom)
    assert cli.main(["solve", "--input", str(e1_file), "--output", str(tmp_path / "x.json")]) == 3


def test_console_entry(tmp_path, e1_file):
    out = tmp_path / "s.json"
    proc = subprocess.run(
        [sys.executable, "-m", "regsched.cli", "solve", "--input", str(e1_file), "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "value 2" in proc.stdout
