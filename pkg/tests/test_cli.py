import csv
import json
import math

import pytest

from amp_lab.cli import run
from amp_lab.fem import Mesh1D
from amp_lab.spectrum import first_eigenpair


def _run(argv, tmp_path):
    return run(argv + ["--output-dir", str(tmp_path)], echo=lambda s: None)


def test_eigen(tmp_path):
    assert _run(["eigen", "--p", "2", "--a", "0", "--b", "3.14159265358979", "--n", "2000",
                 "--index", "1"], tmp_path) == 0
    out = json.loads((tmp_path / "eigen.json").read_text())
    assert out["value"] == pytest.approx(1.0, abs=1e-4)
    assert (tmp_path / "eigen_summary.txt").exists()
    assert (tmp_path / "eigen1.txt").exists()


def test_example(tmp_path, capsys):
    assert run(["example", "--n", "2000", "--output-dir", str(tmp_path)]) == 0
    assert "lambda0" in capsys.readouterr().out
    out = json.loads((tmp_path / "example.json").read_text())
    assert 3 < out["lambda0"] < 3.5 and out["passed"]


def test_verify_golden(tmp_path):
    assert _run(["verify", "--p", "2", "--f", "one_minus_sin_plus", "0.05", "--n", "2000"],
                tmp_path) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] and report["certifies"] == "all-solutions"
    assert "overall: PASS" in (tmp_path / "verify_summary.txt").read_text()


def test_solve_and_lambda_star(tmp_path):
    assert _run(["solve", "--p", "3", "--n", "201", "--lambda", "2.0", "--f",
                 "one_minus_sin_plus", "0.05"], tmp_path) == 0
    meta = json.loads((tmp_path / "solution.json").read_text())
    for key in ("p", "lambda", "energy", "pde_residual", "nehari_residual", "sign_class",
                "method"):
        assert key in meta
    assert _run(["lambda-star", "--n", "201"], tmp_path) == 0
    star = json.loads((tmp_path / "lambda_star.json").read_text())
    assert 1 < star["value"] < 4


def test_lambda_f(tmp_path):
    assert _run(["lambda-f", "--n", "201", "--f", "one_minus_sin_plus", "0.05"], tmp_path) == 0
    est = json.loads((tmp_path / "lambda_f.json").read_text())
    assert est["lambda1"] < est["lambda_f"] <= est["lambda_star"]


def test_branch_is_deterministic(tmp_path):
    argv = ["branch", "--p", "3", "--n", "151", "--lambda-grid", "0.2:3:6"]
    assert _run(argv, tmp_path / "one") == 0
    assert _run(argv, tmp_path / "two") == 0
    first = (tmp_path / "one" / "branch.csv").read_bytes()
    assert first == (tmp_path / "two" / "branch.csv").read_bytes()
    assert ((tmp_path / "one" / "branch.json").read_bytes()
            == (tmp_path / "two" / "branch.json").read_bytes())
    rows = list(csv.reader(first.decode().splitlines()))
    assert rows[0][0] == "lambda" and len(rows) == 7


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"p = 2\nn = 101\noutput_dir = {tmp_path / 'fromfile'}\n")
    assert run(["eigen", "--config", str(cfg), "--p", "3"], echo=lambda s: None) == 0
    out = json.loads((tmp_path / "fromfile" / "eigen.json").read_text())
    assert out["p"] == 3.0 and out["n"] == 101


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("AMP_LAB_OUTPUT_DIR", str(tmp_path / "env"))
    assert run(["eigen", "--n", "51"], echo=lambda s: None) == 0
    assert (tmp_path / "env" / "eigen.json").exists()


@pytest.mark.parametrize("argv, flag", [
    (["solve", "--p", "0.5", "--lambda", "1"], "--p"),
    (["solve", "--f", "bogus"], "--f"),
    (["branch", "--lambda-grid", "3:1:4"], "--lambda-grid"),
    (["solve"], "--lambda"),
])
def test_usage_errors_exit_2(argv, flag, tmp_path, capsys):
    assert _run(argv, tmp_path) == 2
    assert flag in capsys.readouterr().err


def test_bad_config_line_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("p = 2\nwhat = 1\n")
    assert _run(["eigen", "--config", str(cfg)], tmp_path) == 2
    assert "line 2" in capsys.readouterr().err


def test_unknown_subcommand_exit_2(tmp_path):
    assert run(["dance"]) == 2


def test_computational_failure_exit_1(tmp_path, capsys):
    # lambda_1 itself is excluded from every solver window
    lam1 = first_eigenpair(3.0, Mesh1D(0, math.pi, 101)).value
    assert _run(["solve", "--p", "3", "--n", "101", "--lambda", repr(lam1)], tmp_path) == 1
    assert "OutOfWindowError" in capsys.readouterr().err
