"""CLI behavior: exit codes, file round-trips, deterministic reports."""

import json
import math
import os

import numpy as np
import pytest

import grouplasso as gl
from grouplasso import io as gio
from grouplasso.cli import run


@pytest.fixture
def problem_dir(tmp_path):
    rng = np.random.default_rng(0)
    N, K = 20, 6
    Q, _ = np.linalg.qr(rng.standard_normal((N, K)))
    X = math.sqrt(N) * Q
    beta = np.zeros(K)
    beta[:2] = 1.5
    y = X @ beta + 0.1 * rng.standard_normal(N)
    gio.save_matrix(X, str(tmp_path / "X.csv"))
    gio.save_matrix(y.reshape(-1, 1), str(tmp_path / "y.csv"))
    manifest = {
        "design": "X.csv",
        "response": "y.csv",
        "groups": [[0, 1], [2, 3], [4, 5]],
        "lambda": [0.1, 0.1, 0.1],
    }
    gio.write_json(manifest, str(tmp_path / "problem.json"))
    return tmp_path


def test_matrix_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    X = rng.standard_normal((7, 3))
    path = str(tmp_path / "m.csv")
    gio.save_matrix(X, path)
    np.testing.assert_array_equal(gio.load_matrix(path), X)


def test_manifest_missing_groups(tmp_path):
    gio.write_json({"design": "X.csv", "response": "y.csv"}, str(tmp_path / "p.json"))
    with pytest.raises(gl.CoverageError):
        gio.load_problem_manifest(str(tmp_path / "p.json"))


def test_solve_happy_path(problem_dir):
    out = str(problem_dir / "result.json")
    code = run(["solve", "--problem", str(problem_dir / "problem.json"), "--out", out])
    assert code == 0
    result = json.load(open(out))
    assert result["converged"]
    assert result["kkt_residual"] <= 1e-8
    assert len(result["beta"]) == 6


def test_solve_missing_groups_exit_1(problem_dir, capsys):
    gio.write_json(
        {"design": "X.csv", "response": "y.csv"}, str(problem_dir / "bad.json")
    )
    code = run(
        ["solve", "--problem", str(problem_dir / "bad.json"),
         "--out", str(problem_dir / "r.json")]
    )
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "CoverageError"


def test_tune_multitask(tmp_path):
    out = str(tmp_path / "tune.json")
    code = run(
        ["tune", "--regime", "multitask", "--sigma", "1", "--n", "100", "--T", "4",
         "--M", "16", "--A", "10", "--out", out]
    )
    assert code == 0
    result = json.load(open(out))
    assert result["regime"] == "multitask"
    assert result["lambda"][0] == pytest.approx(0.39828, abs=1e-5)
    assert result["probability"] == pytest.approx(1 - 2 * 16**-3)


def test_simulate_solve_recover_pipeline(tmp_path):
    cfg = {"n": 16, "T": 4, "M_vars": 8, "s": 2, "amplitude": 3.0, "seed": 11}
    gio.write_json(cfg, str(tmp_path / "sim.json"))
    data = str(tmp_path / "data")
    assert run(["simulate", "--config", str(tmp_path / "sim.json"), "--out", data]) == 0
    for name in ("design.csv", "response.csv", "problem.json", "multitask.json",
                 "metadata.json", "beta_star.csv"):
        assert os.path.exists(os.path.join(data, name))

    manifest = json.load(open(os.path.join(data, "problem.json")))
    manifest["lambda"] = [0.3] * 8
    gio.write_json(manifest, os.path.join(data, "problem.json"))
    res = os.path.join(data, "result.json")
    assert run(["solve", "--problem", os.path.join(data, "problem.json"), "--out", res]) == 0

    rec = os.path.join(data, "recover.json")
    code = run(
        ["recover", "--problem", os.path.join(data, "problem.json"), "--result", res,
         "--alpha", "1e9", "--p", "inf", "--out", rec]
    )
    assert code == 0
    recovered = json.load(open(rec))
    meta = json.load(open(os.path.join(data, "metadata.json")))
    assert recovered["threshold"] > 0
    assert "radii" in recovered
    assert meta["seed"] == 11


def test_verify_reports_deterministic(tmp_path):
    cfg = {"spec": {"n": 12, "T": 3, "M_vars": 6, "s": 2, "amplitude": 2.0}, "A": 10.0,
           "coverage_floor": 0.0}
    gio.write_json(cfg, str(tmp_path / "cfg.json"))
    outs = []
    for name in ("a.json", "b.json"):
        out = str(tmp_path / name)
        code = run(
            ["verify", "--experiment", "oracle", "--trials", "3", "--seed", "7",
             "--config", str(tmp_path / "cfg.json"), "--out", out]
        )
        assert code == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]
    assert os.path.exists(str(tmp_path / "a.trials.csv"))


def test_verify_moment_small(tmp_path):
    cfg = {"cases": [{"m": 2, "M": 4, "n": 10, "dist": "rademacher"}], "n_mc": 2000}
    gio.write_json(cfg, str(tmp_path / "cfg.json"))
    out = str(tmp_path / "m.json")
    code = run(
        ["verify", "--experiment", "moment", "--seed", "3",
         "--config", str(tmp_path / "cfg.json"), "--out", out]
    )
    assert code == 0
    rep = json.load(open(out))
    assert rep["cases"][0]["holds"]


def test_verify_assertion_failure_exit_3(tmp_path, capsys):
    # an impossible coverage floor forces the assertion path
    cfg = {"spec": {"n": 12, "T": 3, "M_vars": 6, "s": 2, "amplitude": 2.0}, "A": 10.0,
           "coverage_floor": 1.01}
    gio.write_json(cfg, str(tmp_path / "cfg.json"))
    code = run(
        ["verify", "--experiment", "oracle", "--trials", "2", "--seed", "1",
         "--config", str(tmp_path / "cfg.json"), "--out", str(tmp_path / "r.json")]
    )
    assert code == 3
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "VerifyAssertionError"


def test_verify_chi2_subcommand(tmp_path):
    cfg = {"kind": "uniform", "N": 50, "x_grid": [1.0, 2.0], "n_mc": 20000}
    gio.write_json(cfg, str(tmp_path / "cfg.json"))
    out = str(tmp_path / "chi2.json")
    code = run(
        ["verify", "--experiment", "chi2", "--seed", "2",
         "--config", str(tmp_path / "cfg.json"), "--out", out]
    )
    assert code == 0
    rep = json.load(open(out))
    assert rep["holds"]


def test_diagnose_subcommand(problem_dir):
    out = str(problem_dir / "diag.json")
    code = run(
        ["diagnose", "--problem", str(problem_dir / "problem.json"), "--s", "1",
         "--out", out]
    )
    assert code == 0
    rep = json.load(open(out))
    assert rep["phi"] == pytest.approx(1.0, rel=1e-8)
    assert rep["kappa_sampled"] > 0
