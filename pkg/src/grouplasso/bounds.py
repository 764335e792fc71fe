"""Theoretical bound right-hand sides and the Monte Carlo harness that
checks empirical errors against them at the stated probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import coherence_alpha, re_from_coherence, re_sampled, x_star
from .errors import DomainError, NonConstantDiagonalError
from .model import Problem, gram_summary, mixed_norm
from .recovery import estimate_support, min_signal_ok
from .simulate import SimSpec, SimulatedDataset, simulate_dataset
from .solver import SolveOptions, solve_group_lasso, solve_lasso
from .tuning import lambda_multitask, lambda_nongaussian, moment_constant, threshold_constants


def trial_seed(master_seed: int, trial: int) -> int:
    """Per-trial stream derivation: master_seed XOR trial_index."""
    return (master_seed ^ trial) & (2**64 - 1)


# ---------------------------------------------------------------------------
# Right-hand sides


@dataclass(frozen=True)
class TheoreticalBounds:
    """Per-bound RHS values keyed by equation id, with shared inputs."""

    rhs: dict[str, float]
    probability: float | None
    inputs: dict


def oracle_rhs(
    lam,
    J,
    kappa: float,
    kappa_2s: float | None,
    lam_min: float,
    phi_max: float,
    s: int,
    beta_norm21: float | None = None,
) -> TheoreticalBounds:
    """General oracle-inequality right-hand sides for a support J.

    t0: prediction bound without design conditions (needs ||beta*||_{2,1});
    t1/t2/t3 need kappa > 0; t4 needs kappa_2s > 0.
    """
    lam = np.asarray(lam, dtype=np.float64)
    J = sorted(int(j) for j in J)
    sum_sq = float(np.sum(lam[J] ** 2))
    rhs: dict[str, float] = {}
    if beta_norm21 is not None:
        rhs["t0"] = 4.0 * beta_norm21 * float(lam.max())
    if kappa <= 0:
        raise DomainError("oracle bounds t1..t3 need kappa > 0")
    rhs["t1"] = 16.0 / kappa**2 * sum_sq
    rhs["t2"] = 16.0 / kappa**2 * sum_sq / lam_min
    rhs["t3"] = 64.0 * phi_max / kappa**2 * sum_sq / lam_min**2
    if kappa_2s is not None:
        if kappa_2s <= 0:
            raise DomainError("oracle bound t4 needs kappa_2s > 0")
        rhs["t4"] = 4.0 * math.sqrt(10.0) / kappa_2s**2 * sum_sq / (lam_min * math.sqrt(s))
    return TheoreticalBounds(
        rhs=rhs,
        probability=None,
        inputs={
            "s": s,
            "kappa": kappa,
            "kappa_2s": kappa_2s,
            "lam_min": lam_min,
            "phi_max": phi_max,
        },
    )


def bias_oracle_rhs(problem: Problem, beta_star, kappa7: float, candidates) -> float:
    """Bias-aware prediction bound, minimized over a candidate list.

    min over candidates beta of 96/kappa7^2 sum_{J(beta)} lambda_j^2
    + (2/N) ||X(beta - beta*)||^2, with kappa7 the cone-factor-7 constant.
    """
    if kappa7 <= 0:
        raise DomainError("bias oracle needs kappa7 > 0")
    best = math.inf
    for beta in candidates:
        norms = problem.partition.group_norms(beta)
        sum_sq = float(np.sum(problem.lam[norms > 0.0] ** 2))
        r = problem.X @ (np.asarray(beta) - beta_star)
        val = 96.0 / kappa7**2 * sum_sq + 2.0 * float(r @ r) / problem.N
        best = min(best, val)
    return best


def multitask_oracle_rhs(
    sigma: float,
    n: int,
    T: int,
    M: int,
    s: int,
    A: float,
    kappa_mt: float,
    kappa_mt_2s: float | None,
    phi_mt: float,
    beta_norm21: float | None = None,
) -> TheoreticalBounds:
    """Closed-form multi-task right-hand sides (per-task normalized LHS):

    t0 bounds (1/nT)||X d||^2, t1 likewise, t2 bounds (1/sqrt(T))||d||_{2,1},
    t3 bounds M(beta_hat), t4 bounds (1/sqrt(T))||d||.
    """
    if A <= 2.5:
        raise DomainError(f"A must be > 5/2, got {A}")
    if kappa_mt <= 0:
        raise DomainError("kappa_mt must be > 0")
    fac = 1.0 + A * math.log(M) / T
    rhs: dict[str, float] = {}
    if beta_norm21 is not None:
        rhs["t0"] = 8.0 * math.sqrt(2.0) * sigma / math.sqrt(n * T) * math.sqrt(fac) * beta_norm21
    rhs["t1"] = 128.0 * sigma**2 / kappa_mt**2 * s / n * fac
    rhs["t2"] = 32.0 * math.sqrt(2.0) * sigma / kappa_mt**2 * s / math.sqrt(n) * math.sqrt(fac)
    rhs["t3"] = 64.0 * phi_mt / kappa_mt**2 * s
    if kappa_mt_2s is not None and kappa_mt_2s > 0:
        rhs["t4"] = (
            16.0 * math.sqrt(5.0) * sigma / kappa_mt_2s**2 * math.sqrt(s / n) * math.sqrt(fac)
        )
    prob = 1.0 - 2.0 * M ** (1.0 - 2.0 * A / 5.0)
    return TheoreticalBounds(
        rhs=rhs,
        probability=prob,
        inputs={"s": s, "kappa_mt": kappa_mt, "phi_mt": phi_mt, "A": A},
    )


def nongaussian_rhs(
    x_star_val: float,
    b: float,
    n: int,
    T: int,
    M: int,
    s: int,
    delta: float,
    kappa_mt: float,
    kappa_mt_2s: float | None,
    phi_mt: float,
    alpha: float | None = None,
    beta_norm21: float | None = None,
) -> TheoreticalBounds:
    """Fourth-moment-noise right-hand sides (per-task normalized LHS).

    t11-0/t11 bound (1/nT)||X d||^2, t21 bounds (1/sqrt(T))||d||_{2,1},
    t31 bounds M(beta_hat), l2 bounds (1/sqrt(T))||d||, supnorm bounds
    (1/sqrt(T))||d||_{2,inf} (needs the coherence margin alpha).
    """
    if delta <= 0:
        raise DomainError("delta must be > 0")
    if kappa_mt <= 0:
        raise DomainError("kappa_mt must be > 0")
    fac = 1.0 + math.log(M) ** (1.5 + delta) / math.sqrt(T)
    xb = x_star_val * b
    rhs: dict[str, float] = {}
    if beta_norm21 is not None:
        rhs["t11-0"] = 4.0 * xb / math.sqrt(n * T) * math.sqrt(fac) * beta_norm21
    rhs["t11"] = 16.0 * xb**2 / kappa_mt**2 * s / n * fac
    rhs["t21"] = 16.0 * xb / kappa_mt**2 * s / math.sqrt(n) * math.sqrt(fac)
    rhs["t31"] = 64.0 * phi_mt / kappa_mt**2 * s
    if kappa_mt_2s is not None and kappa_mt_2s > 0:
        rhs["l2"] = 4.0 * math.sqrt(10.0) * xb / kappa_mt_2s**2 * math.sqrt(s / n) * math.sqrt(fac)
    if alpha is not None and alpha > 1:
        c_tilde = (1.5 + 8.0 / (7.0 * (alpha - 1.0))) * xb
        rhs["supnorm"] = c_tilde / math.sqrt(n) * math.sqrt(fac)
    prob = 1.0 - 4.0 * math.sqrt(math.log(2 * M)) * math.sqrt(
        (8.0 * math.log(12 * M)) ** 2 + 1.0
    ) / math.log(M) ** (1.5 + delta)
    return TheoreticalBounds(
        rhs=rhs,
        probability=prob,
        inputs={"s": s, "x_star": x_star_val, "b": b, "kappa_mt": kappa_mt, "delta": delta},
    )


def lasso_lower_rhs(
    A: float,
    sigma: float,
    phi: float,
    phi_max: float,
    K: int,
    N: int,
    M_prime: int,
    kappa_prime: float | None = None,
    s_prime: int | None = None,
    max_offdiag: float | None = None,
) -> TheoreticalBounds:
    """Lasso lower-bound right-hand sides and the prescribed penalty r.

    lb1 lower-bounds (1/N)||X d||^2, lb2 lower-bounds ||d||; lbc is the
    minimum-signal threshold on |Psi_jj beta*_j| (when kappa' is given).
    """
    if A <= 2.0 * math.sqrt(2.0):
        raise DomainError(f"A must be > 2*sqrt(2), got {A}")
    r = A * sigma * math.sqrt(phi * math.log(K) / N)
    rhs = {
        "lb1": M_prime * A**2 * sigma**2 * phi * math.log(K) / (4.0 * phi_max * N),
        "lb2": A * sigma / (2.0 * phi_max) * math.sqrt(M_prime * phi * math.log(K) / N),
        "r": r,
    }
    if kappa_prime is not None:
        if s_prime is None or max_offdiag is None:
            raise DomainError("lbc threshold needs s_prime and max_offdiag")
        rhs["lbc"] = (1.5 + 16.0 * s_prime / kappa_prime**2 * max_offdiag) * r
    prob = 1.0 - K ** (1.0 - A**2 / 8.0)
    return TheoreticalBounds(rhs=rhs, probability=prob, inputs={"A": A, "M_prime": M_prime})


# ---------------------------------------------------------------------------
# Monte Carlo harness


@dataclass
class TrialRecord:
    trial: int
    seed: int
    event_A: bool
    lhs: dict[str, float]
    rhs: dict[str, float]
    satisfied: dict[str, bool]
    extra: dict = field(default_factory=dict)


@dataclass
class CoverageReport:
    experiment: str
    trials: int
    target_probability: float | None
    per_bound: dict[str, dict]
    event_A_frequency: float | None
    records: list[TrialRecord] = field(repr=False, default_factory=list)
    config: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "trials": self.trials,
            "target_probability": self.target_probability,
            "event_A_frequency": self.event_A_frequency,
            "per_bound": self.per_bound,
            "config": self.config,
        }


def _aggregate(experiment, records, target, config, with_event=True) -> CoverageReport:
    ids = sorted({k for rec in records for k in rec.satisfied})
    per_bound = {}
    for bid in ids:
        rel = [rec for rec in records if bid in rec.satisfied]
        sat = sum(rec.satisfied[bid] for rec in rel)
        lhs_vals = np.array([rec.lhs.get(bid, math.nan) for rec in rel])
        finite = lhs_vals[np.isfinite(lhs_vals)]
        quantiles = (
            {q: float(np.quantile(finite, q)) for q in (0.5, 0.9, 0.99)} if finite.size else {}
        )
        sat_event = [rec.satisfied[bid] for rec in rel if rec.event_A]
        per_bound[bid] = {
            "trials": len(rel),
            "satisfied": int(sat),
            "coverage": sat / len(rel) if rel else math.nan,
            "target": target,
            "lhs_quantiles": quantiles,
            "event_A_trials": len(sat_event),
            "event_A_violations": int(len(sat_event) - sum(sat_event)),
        }
    freq = (
        sum(rec.event_A for rec in records) / len(records) if (records and with_event) else None
    )
    return CoverageReport(
        experiment=experiment,
        trials=len(records),
        target_probability=target,
        per_bound=per_bound,
        event_A_frequency=freq,
        records=records,
        config=config,
    )


def _certified_kappa_mt(ds: SimulatedDataset, lam_vec, s: int, seed: int):
    """(kappa_mt, phi, alpha, source): coherence-certified when alpha > 1,
    sampled (flagged heuristic) otherwise."""
    gram = gram_summary(ds.problem.X, ds.partition)
    T = ds.spec.T
    lam_vec = np.asarray(lam_vec, dtype=np.float64)
    if float(lam_vec.max()) <= 0.0:
        # noiseless corner: the coherence ratios only involve lam_min/lam_max
        lam_vec = np.ones(ds.partition.M)
    try:
        alpha = coherence_alpha(gram, ds.partition, lam_vec, s)
    except NonConstantDiagonalError:
        alpha = 0.0
    if alpha > 1 and gram.phi is not None:
        kappa = re_from_coherence(alpha, gram.phi)
        return kappa * math.sqrt(T), gram.phi, alpha, "certified"
    kappa = re_sampled(ds.problem.X, ds.partition, lam_vec, s, 3.0, 500, seed)
    phi = gram.phi if gram.phi is not None else float(np.diag(gram.Psi).max())
    return kappa * math.sqrt(T), phi, alpha, "heuristic"


def _event_A(ds: SimulatedDataset, lam_vec) -> bool:
    g = ds.problem.X.T @ ds.W / ds.problem.N
    norms = ds.partition.group_norms(g)
    return bool(np.all(norms <= lam_vec / 2.0))


def _group_metrics(ds: SimulatedDataset, beta_hat):
    T = ds.spec.T
    delta = beta_hat - ds.beta_star
    Xd = ds.problem.X @ delta
    part = ds.partition
    return {
        "pred": float(Xd @ Xd) / ds.problem.N,
        "l21": mixed_norm(delta, part, 1) / math.sqrt(T),
        "l2": float(np.linalg.norm(delta)) / math.sqrt(T),
        "supnorm": mixed_norm(delta, part, math.inf) / math.sqrt(T),
        "M_hat": float(np.count_nonzero(part.group_norms(beta_hat) > 0.0)),
    }


def verify_oracle(spec: SimSpec, A: float, trials: int, seed: int) -> CoverageReport:
    """Monte Carlo check of the Gaussian multi-task oracle inequalities."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if spec.noise != "gaussian":
        raise DomainError("verify_oracle assumes Gaussian noise")
    records = []
    target = None
    for i in range(trials):
        tseed = trial_seed(seed, i)
        ds = simulate_dataset(spec.with_seed(tseed))
        tuned = lambda_multitask(ds.noise_level, spec.n, spec.T, spec.M_vars, A)
        target = tuned.probability
        lam_vec = np.full(ds.partition.M, tuned.value)
        problem = Problem.create(ds.problem.X, ds.problem.y, ds.partition, lam_vec)
        result = solve_group_lasso(problem, SolveOptions(phi_max=_phi_max_hint(ds)))
        kappa_mt, phi, alpha, source = _certified_kappa_mt(ds, lam_vec, spec.s, tseed)
        bounds = multitask_oracle_rhs(
            sigma=ds.noise_level,
            n=spec.n,
            T=spec.T,
            M=spec.M_vars,
            s=spec.s,
            A=A,
            kappa_mt=kappa_mt,
            kappa_mt_2s=kappa_mt,  # same coherence certificate applies at 2s
            phi_mt=spec.T * phi,
            beta_norm21=mixed_norm(ds.beta_star, ds.partition, 1),
        )
        m = _group_metrics(ds, result.beta_hat)
        lhs = {"t0": m["pred"], "t1": m["pred"], "t2": m["l21"], "t3": m["M_hat"], "t4": m["l2"]}
        # absolute slack keeps the noiseless corner (both sides 0 up to
        # solver tolerance) from registering as a violation
        sat = {k: lhs[k] <= bounds.rhs[k] + 1e-12 for k in bounds.rhs if k in lhs}
        records.append(
            TrialRecord(
                trial=i,
                seed=tseed,
                event_A=_event_A(ds, lam_vec),
                lhs={k: lhs[k] for k in sat},
                rhs=dict(bounds.rhs),
                satisfied=sat,
                extra={"kappa_source": source, "alpha": alpha, "converged": result.converged},
            )
        )
    config = {"spec": ds.metadata(), "A": A, "trials": trials, "seed": seed}
    return _aggregate("oracle", records, target, config)


def _phi_max_hint(ds: SimulatedDataset) -> float | None:
    # orthonormal tasks have Psi = I/T exactly; skip the power iteration
    if ds.spec.design == "orthonormal-tasks":
        return 1.0 / ds.spec.T
    return None


def compare_estimators(
    spec: SimSpec, A_group: float, A_lasso: float, trials: int, seed: int
) -> CoverageReport:
    """Group Lasso vs Lasso on the orthogonal multi-task construction.

    Checks the Lasso lower bounds lb1/lb3 on every Lasso event-A trial and
    records the prediction-error ratio between the two estimators.
    """
    if spec.design != "orthonormal-tasks" or spec.pattern != "dense-in-group":
        raise DomainError("comparison needs orthonormal tasks and a dense-in-group signal")
    n, T, M, s = spec.n, spec.T, spec.M_vars, spec.s
    K, N = M * T, n * T
    phi = 1.0 / T  # orthogonal construction: Psi = I/T
    records = []
    target = None
    for i in range(trials):
        tseed = trial_seed(seed, i)
        ds = simulate_dataset(spec.with_seed(tseed))
        sigma = ds.noise_level
        tuned = lambda_multitask(sigma, n, T, M, A_group)
        lam_vec = np.full(M, tuned.value)
        gl_problem = Problem.create(ds.problem.X, ds.problem.y, ds.partition, lam_vec)
        gl = solve_group_lasso(gl_problem, SolveOptions(phi_max=1.0 / T))

        lower = lasso_lower_rhs(
            A_lasso, sigma, phi, phi, K, N, M_prime=0,
            kappa_prime=math.sqrt(phi), s_prime=s * T, max_offdiag=0.0,
        )
        target = lower.probability
        r = lower.rhs["r"]
        # minimum-signal condition of the comparison construction
        if spec.amplitude * phi <= lower.rhs["lbc"]:
            raise DomainError(
                "signal amplitude does not meet the Lasso minimum-signal condition"
            )
        la = solve_lasso(ds.problem.X, ds.problem.y, r, SolveOptions(phi_max=1.0 / T))

        delta_l = la.beta_hat - ds.beta_star
        pred_l = float(np.linalg.norm(ds.problem.X @ delta_l) ** 2) / N
        m_prime = int(np.count_nonzero(la.beta_hat))
        lb = lasso_lower_rhs(A_lasso, sigma, phi, phi, K, N, M_prime=m_prime)
        gl_metrics = _group_metrics(ds, gl.beta_hat)
        pred_gl = gl_metrics["pred"]

        event_l = bool(np.max(np.abs(ds.problem.X.T @ ds.W)) / N <= r / 2.0)
        sat = {
            "lb1": pred_l >= lb.rhs["lb1"],
            "lb3": m_prime >= s * T,
            "gl_beats_lasso": pred_gl < pred_l,
        }
        records.append(
            TrialRecord(
                trial=i,
                seed=tseed,
                event_A=event_l,
                lhs={"lb1": pred_l, "lb3": float(m_prime), "gl_beats_lasso": pred_gl / pred_l},
                rhs={"lb1": lb.rhs["lb1"], "lb3": float(s * T), "gl_beats_lasso": 1.0},
                satisfied=sat,
                extra={"pred_group": pred_gl, "pred_lasso": pred_l, "r": r},
            )
        )
    pred_g = np.array([rec.extra["pred_group"] for rec in records])
    pred_l_all = np.array([rec.extra["pred_lasso"] for rec in records])
    config = {
        "spec": ds.metadata(),
        "A_group": A_group,
        "A_lasso": A_lasso,
        "trials": trials,
        "seed": seed,
        "mean_pred_group": float(pred_g.mean()),
        "mean_pred_lasso": float(pred_l_all.mean()),
        "ratio_quantiles": {
            q: float(np.quantile(pred_g / pred_l_all, q)) for q in (0.1, 0.5, 0.9)
        },
    }
    return _aggregate("compare", records, target, config)


def verify_pattern_recovery(spec: SimSpec, A: float, trials: int, seed: int) -> CoverageReport:
    """Exact-recovery frequency of group-norm thresholding."""
    records = []
    target = None
    for i in range(trials):
        tseed = trial_seed(seed, i)
        ds = simulate_dataset(spec.with_seed(tseed))
        tuned = lambda_multitask(ds.noise_level, spec.n, spec.T, spec.M_vars, A)
        target = tuned.probability
        lam_vec = np.full(ds.partition.M, tuned.value)
        gram = gram_summary(ds.problem.X, ds.partition)
        if gram.phi is None:
            raise DomainError("pattern recovery needs a constant Gram diagonal")
        alpha = coherence_alpha(gram, ds.partition, lam_vec, spec.s)
        if alpha <= 1:
            raise DomainError(f"coherence margin alpha={alpha:.3f} <= 1; config refused")
        if not min_signal_ok(ds.beta_star, ds.partition, tuned.value, gram.phi, alpha):
            raise DomainError("amplitude below the 2c minimum-signal threshold; config refused")
        problem = Problem.create(ds.problem.X, ds.problem.y, ds.partition, lam_vec)
        result = solve_group_lasso(problem, SolveOptions(phi_max=_phi_max_hint(ds)))
        est = estimate_support(result.beta_hat, ds.partition, tuned.value, gram.phi, alpha)
        exact = est.J_hat == ds.J_star
        records.append(
            TrialRecord(
                trial=i,
                seed=tseed,
                event_A=_event_A(ds, lam_vec),
                lhs={"recovery": float(len(est.J_hat ^ ds.J_star))},
                rhs={"recovery": 0.0},
                satisfied={"recovery": exact},
                extra={"threshold": est.threshold, "alpha": alpha},
            )
        )
    config = {"spec": ds.metadata(), "A": A, "trials": trials, "seed": seed}
    return _aggregate("pattern", records, target, config)


def verify_nongaussian(spec: SimSpec, delta: float, trials: int, seed: int) -> CoverageReport:
    """Monte Carlo check of the fourth-moment-noise oracle inequalities."""
    if spec.noise not in ("rademacher", "student-t"):
        raise DomainError("non-Gaussian verification needs rademacher or student-t noise")
    records = []
    target = None
    vacuous = False
    for i in range(trials):
        tseed = trial_seed(seed, i)
        ds = simulate_dataset(spec.with_seed(tseed))
        xs = x_star(ds.tasks)
        b = ds.noise_level
        tuned = lambda_nongaussian(xs, b, spec.n, spec.T, spec.M_vars, delta)
        target = tuned.probability
        vacuous = tuned.vacuous
        lam_vec = np.full(ds.partition.M, tuned.value)
        problem = Problem.create(ds.problem.X, ds.problem.y, ds.partition, lam_vec)
        result = solve_group_lasso(problem, SolveOptions(phi_max=_phi_max_hint(ds)))
        kappa_mt, phi, alpha, source = _certified_kappa_mt(ds, lam_vec, spec.s, tseed)
        bounds = nongaussian_rhs(
            xs, b, spec.n, spec.T, spec.M_vars, spec.s, delta,
            kappa_mt=kappa_mt, kappa_mt_2s=kappa_mt, phi_mt=spec.T * phi,
            alpha=alpha if alpha > 1 else None,
            beta_norm21=mixed_norm(ds.beta_star, ds.partition, 1),
        )
        m = _group_metrics(ds, result.beta_hat)
        lhs = {
            "t11-0": m["pred"],
            "t11": m["pred"],
            "t21": m["l21"],
            "t31": m["M_hat"],
            "l2": m["l2"],
            "supnorm": m["supnorm"],
        }
        sat = {k: lhs[k] <= v + 1e-12 for k, v in bounds.rhs.items() if k in lhs}
        records.append(
            TrialRecord(
                trial=i,
                seed=tseed,
                event_A=_event_A(ds, lam_vec),
                lhs={k: lhs[k] for k in sat},
                rhs=dict(bounds.rhs),
                satisfied=sat,
                extra={"kappa_source": source, "x_star": xs, "b": b},
            )
        )
    config = {
        "spec": ds.metadata(),
        "delta": delta,
        "trials": trials,
        "seed": seed,
        "vacuous_probability": vacuous,
    }
    return _aggregate("nongauss", records, target, config)


# ---------------------------------------------------------------------------
# Concentration-inequality checks


def _draw_entries(rng, dist: str, shape):
    if dist == "gaussian":
        return rng.standard_normal(shape)
    if dist == "rademacher":
        return rng.choice([-1.0, 1.0], size=shape)
    raise DomainError(f"unknown distribution {dist!r}")


def _abs_moment(dist: str, m: float) -> float:
    """E|xi|^m for a single entry of the given zero-mean unit distributions."""
    if dist == "rademacher":
        return 1.0
    if dist == "gaussian":
        return 2.0 ** (m / 2.0) * math.gamma((m + 1.0) / 2.0) / math.sqrt(math.pi)
    raise DomainError(f"unknown distribution {dist!r}")


def verify_maximal_moment(
    m: float, M: int, n: int, dist: str, n_mc: int, seed: int, chunk: int = 20000
) -> dict:
    """Monte Carlo check of the maximal moment inequality.

    LHS = E max_j |sum_i Z_ij|^m, RHS = [8 log(c(m) M)]^(m/2)
    * E [max_j sum_i Z_ij^2]^(m/2); reports estimates, standard errors
    and whether LHS <= RHS (1 + 3 relative SE).  For M = 1 the scalar
    specialization with its analytic RHS is checked as well.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    if n_mc < 1000:
        raise DomainError("n_mc must be >= 1000")
    rng = np.random.default_rng(seed)
    cm = moment_constant(m, M)
    lhs_samples = np.empty(n_mc)
    rhs_samples = np.empty(n_mc)
    done = 0
    while done < n_mc:
        size = min(chunk, n_mc - done)
        Z = _draw_entries(rng, dist, (size, n, M))
        sums = Z.sum(axis=1)
        lhs_samples[done : done + size] = np.max(np.abs(sums), axis=1) ** m
        rhs_samples[done : done + size] = np.max((Z * Z).sum(axis=1), axis=1) ** (m / 2.0)
        done += size
    lhs = float(lhs_samples.mean())
    rhs_exp = float(rhs_samples.mean())
    lhs_se = float(lhs_samples.std(ddof=1)) / math.sqrt(n_mc)
    rhs_se = float(rhs_samples.std(ddof=1)) / math.sqrt(n_mc)
    factor = (8.0 * math.log(cm * M)) ** (m / 2.0)
    rhs = factor * rhs_exp
    rel_se = math.sqrt((lhs_se / max(lhs, 1e-300)) ** 2 + (rhs_se / max(rhs_exp, 1e-300)) ** 2)
    report = {
        "m": m,
        "M": M,
        "n": n,
        "dist": dist,
        "n_mc": n_mc,
        "c_m": cm,
        "lhs": lhs,
        "lhs_se": lhs_se,
        "rhs": rhs,
        "rhs_se": factor * rhs_se,
        "relative_se": rel_se,
        "holds": lhs <= rhs * (1.0 + 3.0 * rel_se),
    }
    if M == 1:
        # scalar case: E|sum xi_i|^m <= [8 log c(m)]^(m/2) n^(m/2-1) sum E|xi_i|^m
        scalar_rhs = (8.0 * math.log(moment_constant(m, 1))) ** (m / 2.0) * n ** (
            m / 2.0 - 1.0
        ) * n * _abs_moment(dist, m)
        report["scalar_rhs"] = scalar_rhs
        report["scalar_holds"] = lhs <= scalar_rhs * (1.0 + 3.0 * lhs_se / max(lhs, 1e-300))
    return report


def chi2_tail_bound(x: float, m_v: float) -> float:
    """2 exp(-x^2 / (2 (1 + sqrt(2) x m_v))) for the weighted chi-square tail."""
    return 2.0 * math.exp(-(x**2) / (2.0 * (1.0 + math.sqrt(2.0) * x * m_v)))


def verify_chi2_tail(v, x_grid, n_mc: int, seed: int, chunk: int = 100000) -> dict:
    """Monte Carlo tail frequencies of the weighted centered chi-square
    statistic against its exponential bound (checked with 3-sigma slack)."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or np.all(v == 0.0):
        raise DomainError("v must be a nonzero vector")
    x_grid = np.asarray(x_grid, dtype=np.float64)
    if np.any(x_grid <= 0):
        raise DomainError("x grid must be positive")
    norm = float(np.linalg.norm(v))
    m_v = float(np.max(np.abs(v))) / norm
    rng = np.random.default_rng(seed)
    counts = np.zeros(x_grid.size, dtype=np.int64)
    done = 0
    while done < n_mc:
        size = min(chunk, n_mc - done)
        xi = rng.standard_normal((size, v.size))
        eta = (xi * xi - 1.0) @ v / (math.sqrt(2.0) * norm)
        counts += (np.abs(eta)[:, None] > x_grid[None, :]).sum(axis=0)
        done += size
    freq = counts / n_mc
    se = np.sqrt(freq * (1.0 - freq) / n_mc)
    bound = np.array([chi2_tail_bound(x, m_v) for x in x_grid])
    holds = freq <= bound + 3.0 * se
    return {
        "m_v": m_v,
        "x_grid": [float(x) for x in x_grid],
        "empirical": [float(f) for f in freq],
        "bound": [float(b) for b in bound],
        "se": [float(s) for s in se],
        "holds": bool(np.all(holds)),
        "per_point": [bool(h) for h in holds],
        "n_mc": n_mc,
    }
