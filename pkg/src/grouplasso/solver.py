"""Accelerated proximal gradient solver for the group-penalized least
squares problem, with KKT-residual certification of solutions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kern
from .errors import DimensionError, DomainError, NonFiniteError
from .model import GroupPartition, Problem, _check_vector, singleton_partition


@dataclass(frozen=True)
class SolveOptions:
    max_iter: int = 50000
    # None -> 1e-8 * max(1, lambda_max)
    tol: float | None = None
    acceleration: bool = True
    # known largest eigenvalue of X'X/N; estimated by power iteration if None
    phi_max: float | None = None
    kkt_check_every: int = 10


@dataclass(frozen=True)
class SolveResult:
    beta_hat: np.ndarray
    kkt_residual: float
    iterations: int
    objective: float
    active_groups: frozenset[int]
    converged: bool
    # objective values recorded at restart / check points (non-increasing)
    objective_trace: tuple[float, ...] = field(default=(), repr=False)

    def to_json_dict(self) -> dict:
        return {
            "beta": [float(b) for b in self.beta_hat],
            "kkt_residual": float(self.kkt_residual),
            "iterations": int(self.iterations),
            "objective": float(self.objective),
            "active_groups": sorted(int(j) for j in self.active_groups),
            "converged": bool(self.converged),
        }


def group_prox(z, partition: GroupPartition, thresholds):
    """Block soft-thresholding: max(0, 1 - t_j/||z^j||) * z^j per group."""
    z = _check_vector(z, partition.K, "z")
    thresholds = _check_vector(thresholds, partition.M, "thresholds")
    return _kern.group_prox(z, partition.indices, partition.offsets, thresholds)


def kkt_residual(problem: Problem, beta) -> float:
    """Maximal violation of the subgradient optimality conditions.

    With g = X'(y - X beta)/N, group j contributes
    ||g^j - lambda_j beta^j/||beta^j||||  when beta^j != 0, and
    max(0, ||g^j|| - lambda_j)            when beta^j == 0.
    """
    beta = _check_vector(beta, problem.K, "beta")
    g = problem.X.T @ (problem.y - problem.X @ beta) / problem.N
    return _kkt_from_gradient(g, beta, problem.partition, problem.lam)


def _kkt_from_gradient(g, beta, partition, lam) -> float:
    norms = partition.group_norms(beta)
    res = 0.0
    for j in range(partition.M):
        sl = slice(partition.offsets[j], partition.offsets[j + 1])
        idx = partition.indices[sl]
        gj = g[idx]
        if norms[j] > 0.0:
            viol = np.linalg.norm(gj - lam[j] * beta[idx] / norms[j])
        else:
            viol = max(0.0, np.linalg.norm(gj) - lam[j])
        res = max(res, float(viol))
    return res


def estimate_phi_max(X, n_iter: int = 200, rtol: float = 1e-12) -> float:
    """Largest eigenvalue of X'X/N by power iteration (no Gram formed)."""
    N, K = X.shape
    v = np.full(K, 1.0 / np.sqrt(K))
    lam_prev = 0.0
    for _ in range(n_iter):
        w = X.T @ (X @ v) / N
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        lam = float(v @ w)
        v = w / nw
        if abs(lam - lam_prev) <= rtol * max(lam, 1.0):
            break
        lam_prev = lam
    return lam


def solve_group_lasso(problem: Problem, opts: SolveOptions = SolveOptions()) -> SolveResult:
    """Minimize (1/N)||X beta - y||^2 + 2 sum_j lambda_j ||beta^j||.

    Fixed-step accelerated proximal gradient with function-value restart;
    convergence is certified by the KKT residual.
    """
    X, y, part, lam = problem.X, problem.y, problem.partition, problem.lam
    N = problem.N
    lam_max = float(lam.max()) if lam.size else 0.0
    tol = opts.tol if opts.tol is not None else 1e-8 * max(1.0, lam_max)

    phi_max = opts.phi_max if opts.phi_max is not None else estimate_phi_max(X)
    # 1% headroom keeps the step valid if power iteration stopped early
    L = 2.0 * phi_max * 1.01 if phi_max > 0 else 1.0
    step = 1.0 / L
    thresholds = 2.0 * step * lam

    Xty = X.T @ y
    beta = np.zeros(part.K)
    z = beta  # extrapolated point
    t_mom = 1.0
    obj_prev = problem.objective(beta)
    trace = [obj_prev]
    best_res = np.inf
    iterations = 0
    converged = False

    for it in range(1, opts.max_iter + 1):
        iterations = it
        grad = 2.0 * (X.T @ (X @ z) - Xty) / N
        beta_next = _kern.group_prox(z - step * grad, part.indices, part.offsets, thresholds)
        if not np.all(np.isfinite(beta_next)):
            raise NonFiniteError("solver iterate contains NaN or Inf")

        if opts.acceleration:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_mom * t_mom))
            z = beta_next + ((t_mom - 1.0) / t_next) * (beta_next - beta)
            t_mom = t_next
        else:
            z = beta_next

        check = (it % opts.kkt_check_every == 0) or it == opts.max_iter
        if check:
            obj = problem.objective(beta_next)
            if opts.acceleration and obj > obj_prev:
                # function-value restart: drop momentum, fall back to the iterate
                t_mom = 1.0
                z = beta_next
            else:
                obj_prev = obj
                trace.append(obj)
            g = (Xty - X.T @ (X @ beta_next)) / N
            best_res = _kkt_from_gradient(g, beta_next, part, lam)
            if best_res <= tol:
                beta = beta_next
                converged = True
                break
        beta = beta_next

    final_obj = problem.objective(beta)
    norms = part.group_norms(beta)
    active = frozenset(int(j) for j in np.flatnonzero(norms > 0.0))
    if not converged:
        best_res = kkt_residual(problem, beta)
    return SolveResult(
        beta_hat=beta,
        kkt_residual=float(best_res),
        iterations=iterations,
        objective=float(final_obj),
        active_groups=active,
        converged=converged,
        objective_trace=tuple(trace),
    )


def solve_lasso(X, y, r: float, opts: SolveOptions = SolveOptions()) -> SolveResult:
    """l1-penalized least squares: singleton groups with a common penalty r."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"X must be 2-D, got shape {X.shape}")
    if r < 0:
        raise DomainError("r must be >= 0")
    part = singleton_partition(X.shape[1])
    problem = Problem.create(X, y, part, np.full(part.M, float(r)))
    return solve_group_lasso(problem, opts)
