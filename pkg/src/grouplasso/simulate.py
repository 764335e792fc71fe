"""Seeded generators for group-sparse truths, structured multi-task
designs and noise, plus full synthetic dataset assembly.

Randomness contract: every generator takes a 64-bit seed and uses NumPy's
default PCG64 stream; trial-parallel callers derive per-trial seeds as
``master_seed XOR trial_index``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict, field

import numpy as np

from .errors import DomainError
from .model import GroupPartition, MultiTaskSpec, Problem, assemble_multitask

DESIGN_KINDS = ("orthonormal-tasks", "gaussian-normalized")
NOISE_KINDS = ("gaussian", "rademacher", "student-t")
PATTERNS = ("dense-in-group", "single-entry")


@dataclass(frozen=True)
class SimSpec:
    n: int
    T: int
    M_vars: int
    s: int
    design: str = "orthonormal-tasks"
    noise: str = "gaussian"
    sigma: float = 1.0
    scale: float = 1.0
    df: float = 5.0
    amplitude: float = 1.0
    pattern: str = "dense-in-group"
    seed: int = 0

    def __post_init__(self):
        if self.s > self.M_vars:
            raise DomainError(f"s={self.s} exceeds M_vars={self.M_vars}")
        if self.design not in DESIGN_KINDS:
            raise DomainError(f"unknown design kind {self.design!r}")
        if self.noise not in NOISE_KINDS:
            raise DomainError(f"unknown noise kind {self.noise!r}")
        if self.pattern not in PATTERNS:
            raise DomainError(f"unknown signal pattern {self.pattern!r}")
        if self.noise == "student-t" and self.df < 5:
            raise DomainError("student-t noise needs df >= 5 for a finite fourth moment")
        if self.design == "orthonormal-tasks" and self.n < self.M_vars:
            raise DomainError("orthonormal tasks need n >= M_vars")

    def with_seed(self, seed: int) -> "SimSpec":
        return SimSpec(**{**asdict(self), "seed": seed})


def gen_beta(M_vars: int, T: int, s: int, amplitude: float, pattern: str, seed: int):
    """Group-sparse truth in the task-major layout; returns (beta, J).

    dense-in-group fills all T entries of each chosen group (group norm
    amplitude * sqrt(T)); single-entry fills one coordinate per group.
    """
    if s > M_vars:
        raise DomainError(f"s={s} exceeds M_vars={M_vars}")
    if pattern not in PATTERNS:
        raise DomainError(f"unknown signal pattern {pattern!r}")
    rng = np.random.default_rng(seed)
    beta = np.zeros(M_vars * T)
    J = sorted(int(j) for j in rng.choice(M_vars, size=s, replace=False)) if s else []
    for j in J:
        if pattern == "dense-in-group":
            for t in range(T):
                beta[t * M_vars + j] = amplitude
        else:
            t = int(rng.integers(T))
            beta[t * M_vars + j] = amplitude
    return beta, frozenset(J)


def gen_design(kind: str, n: int, M_vars: int, T: int, seed: int) -> list[np.ndarray]:
    """Per-task designs with unit Gram diagonal.

    orthonormal-tasks: X_t = sqrt(n) Q_t with Q_t from a seeded Gaussian QR,
    so X_t'X_t/n = I.  gaussian-normalized: i.i.d. Gaussian entries with
    columns rescaled so the diagonal of X_t'X_t/n is exactly 1.
    """
    if kind not in DESIGN_KINDS:
        raise DomainError(f"unknown design kind {kind!r}")
    if kind == "orthonormal-tasks" and n < M_vars:
        raise DomainError("orthonormal tasks need n >= M_vars")
    rng = np.random.default_rng(seed)
    designs = []
    for _ in range(T):
        G = rng.standard_normal((n, M_vars))
        if kind == "orthonormal-tasks":
            Q, R = np.linalg.qr(G)
            Q = Q * np.sign(np.diag(R))
            designs.append(math.sqrt(n) * Q)
        else:
            col_norms = np.linalg.norm(G, axis=0)
            designs.append(G / col_norms * math.sqrt(n))
    return designs


def gen_noise(kind: str, params: dict, N: int, seed: int):
    """Noise vector plus its tuning level (sigma or fourth-moment bound b)."""
    rng = np.random.default_rng(seed)
    if kind == "gaussian":
        sigma = float(params.get("sigma", 1.0))
        if sigma < 0:
            raise DomainError("sigma must be >= 0")
        return sigma * rng.standard_normal(N), sigma
    if kind == "rademacher":
        scale = float(params.get("scale", 1.0))
        return scale * rng.choice([-1.0, 1.0], size=N), scale
    if kind == "student-t":
        df = float(params.get("df", 5.0))
        scale = float(params.get("scale", 1.0))
        if df < 5:
            raise DomainError("student-t noise needs df >= 5")
        # standardize to unit variance, then scale
        w = scale * rng.standard_t(df, size=N) / math.sqrt(df / (df - 2.0))
        b = scale * (3.0 * (df - 2.0) / (df - 4.0)) ** 0.25
        return w, b
    raise DomainError(f"unknown noise kind {kind!r}")


@dataclass(frozen=True)
class SimulatedDataset:
    problem: Problem
    beta_star: np.ndarray
    J_star: frozenset[int]
    W: np.ndarray = field(repr=False)
    noise_level: float  # sigma (gaussian) or b (fourth-moment)
    spec: SimSpec
    tasks: MultiTaskSpec = field(repr=False)

    @property
    def partition(self) -> GroupPartition:
        return self.problem.partition

    def metadata(self) -> dict:
        return asdict(self.spec) | {"noise_level": self.noise_level}


def _noise_params(spec: SimSpec) -> dict:
    return {"sigma": spec.sigma, "scale": spec.scale, "df": spec.df}


def simulate_dataset(spec: SimSpec) -> SimulatedDataset:
    """Draw one multi-task dataset y_t = X_t beta*_t + W_t and assemble it.

    Sub-seeds for the design, truth and noise are derived from spec.seed
    so the three draws are independent.
    """
    rng = np.random.default_rng(spec.seed)
    sub = rng.integers(0, 2**63, size=3)
    designs = gen_design(spec.design, spec.n, spec.M_vars, spec.T, int(sub[0]))
    beta, J = gen_beta(spec.M_vars, spec.T, spec.s, spec.amplitude, spec.pattern, int(sub[1]))
    W, level = gen_noise(spec.noise, _noise_params(spec), spec.n * spec.T, int(sub[2]))
    responses = []
    for t, Xt in enumerate(designs):
        beta_t = beta[t * spec.M_vars : (t + 1) * spec.M_vars]
        Wt = W[t * spec.n : (t + 1) * spec.n]
        responses.append(Xt @ beta_t + Wt)
    tasks = MultiTaskSpec.create(designs, responses)
    X, y, partition = assemble_multitask(tasks)
    problem = Problem.create(X, y, partition, np.zeros(partition.M))
    return SimulatedDataset(
        problem=problem,
        beta_star=beta,
        J_star=J,
        W=W,
        noise_level=level,
        spec=spec,
        tasks=tasks,
    )
