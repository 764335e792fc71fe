"""Command-line entry point.

Subcommands: solve | tune | diagnose | simulate | recover | verify.
Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 assertion failure in a verify experiment.  Errors are reported as a
single-line JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bounds as bnd
from . import io as gio
from .diagnostics import diagnose, x_star
from .errors import (
    CombinatorialBlowupError,
    CoverageError,
    DegenerateError,
    DimensionError,
    DomainError,
    EmptyGroupError,
    GroupLassoError,
    NonConstantDiagonalError,
    NonFiniteError,
    OverlapError,
    ShapeMismatchError,
)
from .model import Problem, gram_summary
from .recovery import estimate_support, pnorm_radius
from .simulate import SimSpec, simulate_dataset
from .solver import SolveOptions, solve_group_lasso
from .tuning import lambda_groups, lambda_multitask, lambda_nongaussian

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_ASSERTION = 3

_VALIDATION_ERRORS = (
    OverlapError,
    CoverageError,
    EmptyGroupError,
    DimensionError,
    ShapeMismatchError,
    DomainError,
    NonConstantDiagonalError,
    CombinatorialBlowupError,
    FileNotFoundError,
    json.JSONDecodeError,
    KeyError,
)
_NUMERICAL_ERRORS = (NonFiniteError, DegenerateError)


class VerifyAssertionError(AssertionError):
    """A verify experiment's pass condition did not hold."""


def _fail(exc, code: int) -> int:
    msg = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(msg), file=sys.stderr)
    return code


def _parse_p(text: str) -> float:
    return math.inf if text in ("inf", "Inf", "infinity") else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grouplasso",
        description="Group Lasso estimation, tuning, diagnostics and bound verification",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("solve", help="solve a problem manifest")
    p.add_argument("--problem", required=True)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=50000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("tune", help="closed-form penalty levels")
    p.add_argument(
        "--regime", required=True, choices=["gaussian", "multitask", "fourth-moment"]
    )
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--A", type=float, default=10.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--x-star", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--problem", default=None, help="manifest (gaussian regime)")
    p.add_argument("--tasks", default=None, help="multi-task manifest (x_* source)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("diagnose", help="design-assumption diagnostics")
    p.add_argument("--problem", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--cone-factor", type=float, default=3.0, choices=[3.0, 7.0])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tasks", default=None, help="multi-task manifest (x_* source)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset")
    p.add_argument("--config", required=True, help="JSON SimSpec")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("recover", help="support estimate from a solve result")
    p.add_argument("--problem", required=True)
    p.add_argument("--result", required=True, help="SolveResult JSON")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--phi", type=float, default=None, help="default: Gram diagonal")
    p.add_argument("--p", action="append", default=None, help="(2,p) radius orders")
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="Monte Carlo bound verification")
    p.add_argument(
        "--experiment",
        required=True,
        choices=["oracle", "lasso-lb", "compare", "moment", "chi2", "nongauss", "pattern"],
    )
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None, help="JSON experiment parameters")
    p.add_argument("--out", required=True)
    return parser


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_solve(args) -> int:
    problem = gio.load_problem_manifest(args.problem)
    opts = SolveOptions(max_iter=args.max_iter, tol=args.tol)
    result = solve_group_lasso(problem, opts)
    gio.write_json(result.to_json_dict(), args.out)
    if not result.converged:
        raise NonFiniteError(
            f"solver did not converge in {args.max_iter} iterations "
            f"(kkt residual {result.kkt_residual:.3e})"
        )
    return EXIT_OK


def _require(args, names) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise DomainError(f"--{name} is required for this tune regime")


def _cmd_tune(args) -> int:
    if args.regime == "gaussian":
        _require(args, ["problem", "M"])
        problem = gio.load_problem_manifest(args.problem)
        gram = gram_summary(problem.X, problem.partition)
        lam = lambda_groups(args.sigma, problem.N, args.M, args.q, gram)
        out = {
            "lambda": [float(v) for v in lam],
            "probability": 1.0 - 2.0 * args.M ** (1.0 - args.q),
            "regime": "gaussian",
        }
    elif args.regime == "multitask":
        _require(args, ["n", "T", "M"])
        tuned = lambda_multitask(args.sigma, args.n, args.T, args.M, args.A)
        out = {
            "lambda": [tuned.value] * args.M,
            "probability": tuned.probability,
            "regime": "multitask",
        }
    else:
        _require(args, ["n", "T", "M"])
        xs = args.x_star
        if xs is None:
            if args.tasks is None:
                raise DomainError("fourth-moment regime needs --x-star or --tasks")
            xs = x_star(gio.load_multitask_manifest(args.tasks))
        tuned = lambda_nongaussian(xs, args.b, args.n, args.T, args.M, args.delta)
        out = {
            "lambda": [tuned.value] * args.M,
            "probability": tuned.probability,
            "regime": "fourth-moment",
            "vacuous": tuned.vacuous,
        }
    gio.write_json(out, args.out)
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    problem = gio.load_problem_manifest(args.problem)
    spec = gio.load_multitask_manifest(args.tasks) if args.tasks else None
    lam = problem.lam if float(problem.lam.max()) > 0 else np.ones(problem.partition.M)
    report = diagnose(
        problem.X,
        problem.partition,
        lam,
        args.s,
        cone_factor=args.cone_factor,
        n_samples=args.samples,
        seed=args.seed,
        spec=spec,
    )
    gio.write_json(report.to_json_dict(), args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    with open(args.config) as f:
        cfg = json.load(f)
    if args.seed is not None:
        cfg["seed"] = args.seed
    spec = SimSpec(**cfg)
    ds = simulate_dataset(spec)
    os.makedirs(args.out, exist_ok=True)

    tasks = []
    for t in range(spec.T):
        dpath, rpath = f"design_{t}.csv", f"response_{t}.csv"
        gio.save_matrix(ds.tasks.designs[t], os.path.join(args.out, dpath))
        gio.save_matrix(ds.tasks.responses[t].reshape(-1, 1), os.path.join(args.out, rpath))
        tasks.append({"design": dpath, "response": rpath})
    gio.write_json({"tasks": tasks}, os.path.join(args.out, "multitask.json"))

    gio.save_matrix(ds.problem.X, os.path.join(args.out, "design.csv"))
    gio.save_matrix(ds.problem.y.reshape(-1, 1), os.path.join(args.out, "response.csv"))
    gio.save_matrix(ds.beta_star.reshape(-1, 1), os.path.join(args.out, "beta_star.csv"))
    gio.write_json(
        {
            "design": "design.csv",
            "response": "response.csv",
            "groups": [list(g) for g in ds.partition.groups],
        },
        os.path.join(args.out, "problem.json"),
    )
    gio.write_json(ds.metadata(), os.path.join(args.out, "metadata.json"))
    return EXIT_OK


def _cmd_recover(args) -> int:
    problem = gio.load_problem_manifest(args.problem)
    with open(args.result) as f:
        result = json.load(f)
    beta_hat = np.asarray(result["beta"], dtype=np.float64)
    phi = args.phi
    if phi is None:
        gram = gram_summary(problem.X, problem.partition)
        if gram.phi is None:
            raise NonConstantDiagonalError("Gram diagonal not constant; pass --phi")
        phi = gram.phi
    lam_max = float(problem.lam.max())
    if lam_max <= 0:
        raise DomainError("recover needs a positive lambda in the problem manifest")
    est = estimate_support(beta_hat, problem.partition, lam_max, phi, args.alpha)
    radii = {}
    for p_text in args.p or []:
        p = _parse_p(p_text)
        radii[p_text] = pnorm_radius(problem.lam, est.J_hat, args.alpha, phi, p)
    gio.write_json(est.to_json_dict() | {"radii": radii}, args.out)
    return EXIT_OK


def _sim_spec_from_config(cfg: dict, seed: int) -> SimSpec:
    spec_cfg = dict(cfg["spec"])
    spec_cfg.setdefault("seed", seed)
    return SimSpec(**spec_cfg)


def _assert_verify(ok: bool, message: str) -> None:
    if not ok:
        raise VerifyAssertionError(message)


def _check_coverage(report, bound_id: str, floor: float) -> None:
    entry = report.per_bound[bound_id]
    _assert_verify(
        entry["coverage"] >= floor,
        f"{bound_id} coverage {entry['coverage']:.4f} below the {floor} floor",
    )


def _check_event_exact(report, bound_id: str) -> None:
    entry = report.per_bound[bound_id]
    _assert_verify(
        entry["event_A_violations"] == 0,
        f"{bound_id} violated on {entry['event_A_violations']} event trials",
    )


def _chi2_vector(cfg: dict) -> np.ndarray:
    v = cfg.get("v")
    if isinstance(v, list):
        return np.asarray(v, dtype=np.float64)
    kind = cfg.get("kind", "uniform")
    N = int(cfg.get("N", 100))
    if kind == "uniform":
        return np.ones(N)
    if kind == "spiked":
        out = np.full(N, 0.01)
        out[0] = 1.0
        return out
    raise DomainError(f"unknown chi2 weight kind {kind!r}")


def _cmd_verify(args) -> int:
    cfg = {}
    if args.config:
        with open(args.config) as f:
            cfg = json.load(f)
    exp = args.experiment
    trials, seed = args.trials, args.seed

    if exp == "oracle":
        spec = _sim_spec_from_config(cfg, seed)
        report = bnd.verify_oracle(spec, cfg.get("A", 10.0), trials, seed)
        out = report.to_json_dict()
        _write_report(out, report, args.out)
        for bid in ("t1", "t2", "t4"):
            _check_coverage(report, bid, cfg.get("coverage_floor", 0.99))
        _check_event_exact(report, "t1")
        _check_event_exact(report, "t3")
    elif exp == "pattern":
        spec = _sim_spec_from_config(cfg, seed)
        report = bnd.verify_pattern_recovery(spec, cfg.get("A", 10.0), trials, seed)
        _write_report(report.to_json_dict(), report, args.out)
        _check_coverage(report, "recovery", cfg.get("coverage_floor", 0.99))
    elif exp in ("compare", "lasso-lb"):
        spec = _sim_spec_from_config(cfg, seed)
        report = bnd.compare_estimators(
            spec, cfg.get("A_group", 2.6), cfg.get("A_lasso", 3.5), trials, seed
        )
        _write_report(report.to_json_dict(), report, args.out)
        _check_event_exact(report, "lb1")
        _check_event_exact(report, "lb3")
        if exp == "compare":
            _assert_verify(
                report.config["mean_pred_group"] < report.config["mean_pred_lasso"],
                "mean group prediction error not below the Lasso's",
            )
            _check_coverage(report, "gl_beats_lasso", cfg.get("win_floor", 0.95))
    elif exp == "moment":
        cases = cfg.get(
            "cases",
            [
                {"m": m, "M": M, "n": n, "dist": dist}
                for (m, M, n) in ((1, 10, 50), (2, 10, 50), (4, 2, 20))
                for dist in ("gaussian", "rademacher")
            ],
        )
        n_mc = int(cfg.get("n_mc", trials))
        reports = []
        for i, case in enumerate(cases):
            rep = bnd.verify_maximal_moment(
                case["m"], case["M"], case["n"], case["dist"], n_mc, bnd.trial_seed(seed, i)
            )
            reports.append(rep)
        gio.write_json({"experiment": "moment", "cases": reports, "seed": seed}, args.out)
        for rep in reports:
            _assert_verify(rep["holds"], f"moment inequality failed for {rep}")
            _assert_verify(
                rep.get("scalar_holds", True), f"scalar moment inequality failed for {rep}"
            )
    elif exp == "chi2":
        v = _chi2_vector(cfg)
        x_grid = cfg.get("x_grid", [0.5, 1.0, 2.0, 3.0])
        n_mc = int(cfg.get("n_mc", max(trials, 1000)))
        rep = bnd.verify_chi2_tail(v, x_grid, n_mc, seed)
        gio.write_json({"experiment": "chi2", "seed": seed} | rep, args.out)
        _assert_verify(rep["holds"], "chi-square tail bound exceeded at a grid point")
    elif exp == "nongauss":
        spec = _sim_spec_from_config(cfg, seed)
        report = bnd.verify_nongaussian(spec, cfg.get("delta", 0.5), trials, seed)
        _write_report(report.to_json_dict(), report, args.out)
        _check_coverage(report, "t11", cfg.get("coverage_floor", 0.95))
    else:  # pragma: no cover - argparse restricts choices
        raise DomainError(f"unknown experiment {exp!r}")
    return EXIT_OK


def _write_report(out_dict: dict, report, path: str) -> None:
    gio.write_json(out_dict, path)
    root, _ = os.path.splitext(path)
    gio.write_trial_csv(report.records, root + ".trials.csv")


_COMMANDS = {
    "solve": _cmd_solve,
    "tune": _cmd_tune,
    "diagnose": _cmd_diagnose,
    "simulate": _cmd_simulate,
    "recover": _cmd_recover,
    "verify": _cmd_verify,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_VALIDATION if e.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.subcommand](args)
    except VerifyAssertionError as e:
        return _fail(e, EXIT_ASSERTION)
    except _VALIDATION_ERRORS as e:
        return _fail(e, EXIT_VALIDATION)
    except _NUMERICAL_ERRORS as e:
        return _fail(e, EXIT_NUMERICAL)
    except GroupLassoError as e:
        return _fail(e, EXIT_VALIDATION)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
