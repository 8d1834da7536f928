import csv
import json
import subprocess
import sys

import pytest

from clde.cli import main


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_summary_has_peak_ratio(tmp_path):
    out = tmp_path / "f2"
    assert main(["run", "--problem", "f2_equal_maxima", "--seed", "7", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert 0.0 <= summary["pr"] <= 1.0
    assert summary["evaluations"] == 100 * 200
    assert summary["config_sources"]["seed"] == "flag"
    assert summary["config_sources"]["population_size"] == "default"


def test_rerun_is_byte_identical(tmp_path):
    args = ["run", "--problem", "f4", "--seed", "2", "--max-generations", "15", "--record-canvas"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("trace.csv", "population.csv", "archive.csv", "canvas.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_mo_run_reports_igd(tmp_path):
    out = tmp_path / "dtlz"
    assert main(["run", "--problem", "dtlz2_d12_m3", "--mode", "mo", "--max-generations", "3",
                 "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert "igd" in summary and "pr" not in summary


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("problem = f5\nmax_generations = 4\npopulation_size = 30\n")
    out = tmp_path / "o"
    assert main(["run", "--config", str(cfg), "--population-size", "20", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["population_size"] == 20
    assert summary["config_sources"]["population_size"] == "flag"
    assert summary["config_sources"]["max_generations"] == "file"
    assert summary["evaluations"] == 20 * 4


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("CLDE_OUTPUT_DIR", str(tmp_path))
    assert main(["run", "--problem", "f1", "--seed", "4", "--max-generations", "2"]) == 0
    assert (tmp_path / "f1_five_uneven_peak_trap_seed4" / "summary.json").exists()


@pytest.mark.parametrize("argv", [
    ["run", "--problem", "nope"],
    ["run", "--problem", "f4", "--population-size", "1"],
    ["run", "--problem", "f4", "--population-size", "many"],
    ["bifurcation", "--mu-max", "4.5"],
])
def test_usage_errors_exit_nonzero(argv, capsys, tmp_path):
    assert main(argv + ([] if argv[0] != "run" else ["--out", str(tmp_path)])) == 1
    assert "error" in capsys.readouterr().err


def test_malformed_config_names_field(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("saliency_beta = high\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "saliency_beta" in capsys.readouterr().err


def test_unknown_flag_exits_one():
    proc = subprocess.run([sys.executable, "-m", "clde", "run", "--bogus"], capture_output=True)
    assert proc.returncode == 1


def test_suite_aggregate_and_isolation(tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps({
        "problems": ["f1", "f2", "f3", "f4", "f5", "not_a_problem"],
        "runs": 10, "overrides": {"max_generations": 3, "population_size": 20},
    }))
    assert main(["suite", str(suite), "--out", str(tmp_path / "s"), "--workers", "2"]) == 2
    rows = _rows(tmp_path / "s" / "aggregate.csv")
    assert [r["problem"] for r in rows] == ["f1", "f2", "f3", "f4", "f5", "not_a_problem"]
    for r in rows[:5]:
        assert r["completed"] == "10" and 0.0 <= float(r["pr_mean"]) <= 1.0
    assert rows[5]["completed"] == "0"
    assert len(_rows(tmp_path / "s" / "failures.csv")) == 10


def test_bifurcation_default_grid_shape(tmp_path):
    out = tmp_path / "bif.csv"
    assert main(["bifurcation", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 301 * 100
    assert float(rows[0]["mu"]) == 2.5 and float(rows[-1]["mu"]) == 4.0


def test_decode_dump(tmp_path, capsys):
    run_dir = tmp_path / "f4"
    assert main(["run", "--problem", "f4", "--max-generations", "3", "--record-canvas",
                 "--out", str(run_dir)]) == 0
    capsys.readouterr()
    dump = tmp_path / "g1.csv"
    assert main(["decode-dump", "--run-dir", str(run_dir), "--generation", "1",
                 "--out", str(dump)]) == 0
    rows = _rows(dump)
    assert len(rows) == 200
    assert all(int(r["basin_id"]) >= 0 for r in rows)
    assert main(["decode-dump", "--run-dir", str(run_dir), "--generation", "9"]) == 1
