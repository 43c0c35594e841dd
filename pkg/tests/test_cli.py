import json
import os
import subprocess
import sys

import pytest

from nestgeom.cli import main

BASE_FAST = ["--prec", "192", "--prec-max", "16384", "--orbit-cap", "20000",
             "--return-cap", "2000", "--levels", "5"]


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_nest_full_map_exit_code(capsys):
    code, out, _ = run_cli(["nest", "--param", "2", *BASE_FAST], capsys)
    assert code == 3
    record = json.loads(out)
    assert record["results"]["termination"] == "nonrecurrent"


def test_nest_renormalizable_exit_code(capsys):
    code, out, _ = run_cli(["nest", "--param", "1.62", *BASE_FAST], capsys)
    assert code == 4
    assert json.loads(out)["results"]["termination"] == "renormalizable"


def test_nest_success_and_csv(tmp_path, capsys):
    out_file = tmp_path / "run.csv"
    code, _, _ = run_cli(["nest", "--param", "1.9120", *BASE_FAST,
                          "--renorm-horizon", "0",
                          "--format", "csv", "--out", str(out_file)], capsys)
    assert code == 0
    text = out_file.read_text()
    assert text.splitlines()[0] == "level,lambda,central,c_geo"


def test_nest_missing_parameter(capsys):
    code, _, err = run_cli(["nest", *BASE_FAST], capsys)
    assert code == 2
    assert "param" in err


def test_nest_bad_parameter(capsys):
    code, _, _ = run_cli(["nest", "--param", "1.2", *BASE_FAST], capsys)
    assert code == 2


def test_nest_io_error(tmp_path, capsys):
    missing = tmp_path / "no" / "such" / "dir" / "x.json"
    code, _, err = run_cli(["nest", "--param", "2", "--out", str(missing),
                            *BASE_FAST], capsys)
    assert code == 7
    assert "io error" in err


def test_search_kneading_prefix(capsys):
    code, out, _ = run_cli(["search", "--target", "kneading:LR",
                            "--digits", "8"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["matched_depth"] == 2
    assert len(payload["parameter"]) > 8


def test_search_malformed_target_file(tmp_path, capsys):
    bad = tmp_path / "target.json"
    bad.write_text("{not json")
    code, _, err = run_cli(["search", "--target", str(bad)], capsys)
    assert code == 2


def test_search_inadmissible_records_file(tmp_path, capsys):
    bad = tmp_path / "target.json"
    bad.write_text(json.dumps([{"level": 2, "ordering": [0, 1],
                                "itineraries": [[0, []]], "depths": [[0, 0], [1, 0]]}]))
    code, _, err = run_cli(["search", "--target", str(bad)], capsys)
    assert code == 2
    assert "target error" in err


def test_sweep_two_rows(capsys):
    code, out, _ = run_cli(["sweep", "--range", "1.99:2.0", "--grid", "2",
                            "--format", "csv", *BASE_FAST], capsys)
    assert code == 0
    lines = [l for l in out.splitlines() if l.strip()]
    assert lines[0] == "a,depth,termination,trigger_level,rho"
    assert len(lines) == 3
    assert lines[2].startswith("2,") or lines[2].startswith("2.0,")
    assert "nonrecurrent" in lines[2]


def test_sweep_rejects_bad_range(capsys):
    code, _, err = run_cli(["sweep", "--range", "1.2:1.4", "--grid", "2"], capsys)
    assert code == 2


def test_sweep_deterministic_across_workers(tmp_path, capsys):
    args = ["sweep", "--range", "1.93:1.99", "--grid", "4", "--format", "json",
            *BASE_FAST, "--renorm-horizon", "0"]
    code, out1, _ = run_cli(args, capsys)
    assert code == 0
    env = dict(os.environ, NESTGEOM_WORKERS="3", PYTHONPATH="src")
    proc = subprocess.run([sys.executable, "-m", "nestgeom.cli", *args],
                          capture_output=True, text=True, env=env, cwd=os.getcwd())
    assert proc.returncode == 0
    assert json.loads(out1) == json.loads(proc.stdout)


def test_analyze_round(tmp_path, capsys):
    rec_path = tmp_path / "run.json"
    code, _, _ = run_cli(["nest", "--param", "1.9120", *BASE_FAST,
                          "--renorm-horizon", "0", "--out", str(rec_path)], capsys)
    assert code == 0
    code, out, _ = run_cli(["analyze", "--target", str(rec_path),
                            "--delta", "0.3"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["delta"] == 0.3
    assert payload["trigger"] is None or payload["trigger"]["level"] >= 1


def test_analyze_missing_file(capsys):
    code, _, _ = run_cli(["analyze", "--target", "/nonexistent.json"], capsys)
    assert code == 7
