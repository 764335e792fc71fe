"""Problem representation: group partitions, designs, Gram summaries,
mixed norms and the multi-task to single-regression assembly."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CoverageError,
    DimensionError,
    DomainError,
    EmptyGroupError,
    OverlapError,
    ShapeMismatchError,
)

# relative tolerance for declaring the Gram diagonal constant
PHI_DIAG_RTOL = 1e-10


@dataclass(frozen=True)
class GroupPartition:
    """Disjoint groups G_1..G_M covering the coordinate set {0..K-1}.

    ``indices``/``offsets`` hold the flattened form used by the kernels:
    ``indices[offsets[j]:offsets[j+1]]`` are the coordinates of group j.
    """

    groups: tuple[tuple[int, ...], ...]
    K: int
    indices: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return len(self.groups)

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    def group_norms(self, beta):
        """Euclidean norm of each group block of ``beta``."""
        from . import _kern

        beta = _check_vector(beta, self.K)
        return _kern.group_norms(beta, self.indices, self.offsets)


def validate_partition(groups, K: int) -> GroupPartition:
    """Validate a list of index lists as a partition of {0..K-1}."""
    if K < 1:
        raise CoverageError(f"K must be >= 1, got {K}")
    if len(groups) == 0:
        raise EmptyGroupError("partition needs at least one group")
    seen = np.zeros(K, dtype=bool)
    flat = []
    for j, g in enumerate(groups):
        idx = np.asarray(list(g), dtype=np.int64)
        if idx.size == 0:
            raise EmptyGroupError(f"group {j} is empty")
        if np.any(idx < 0) or np.any(idx >= K):
            raise CoverageError(f"group {j} has an index outside 0..{K - 1}")
        if np.any(seen[idx]) or len(np.unique(idx)) != idx.size:
            raise OverlapError(f"group {j} repeats an already used index")
        seen[idx] = True
        flat.append(idx)
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise CoverageError(f"index {missing} is not covered by any group")
    indices = np.concatenate(flat)
    offsets = np.zeros(len(flat) + 1, dtype=np.int64)
    np.cumsum([g.size for g in flat], out=offsets[1:])
    return GroupPartition(
        groups=tuple(tuple(int(i) for i in g) for g in flat),
        K=K,
        indices=indices,
        offsets=offsets,
    )


def singleton_partition(K: int) -> GroupPartition:
    """All groups of size one; the ordinary Lasso structure."""
    return validate_partition([[j] for j in range(K)], K)


def _check_vector(v, length, name="vector"):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != length:
        raise DimensionError(f"{name} must have length {length}, got shape {v.shape}")
    return np.ascontiguousarray(v)


def mixed_norm(beta, partition: GroupPartition, p) -> float:
    """Mixed (2,p)-norm: the l_p norm of the per-group Euclidean norms."""
    if not (p >= 1):
        raise DomainError(f"p must lie in [1, inf], got {p}")
    norms = partition.group_norms(beta)
    if math.isinf(p):
        return float(norms.max())
    if p == 1:
        return float(norms.sum())
    return float(np.sum(norms**p) ** (1.0 / p))


@dataclass(frozen=True)
class Problem:
    """Design, response, partition and per-group penalties."""

    X: np.ndarray
    y: np.ndarray
    partition: GroupPartition
    lam: np.ndarray

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def K(self) -> int:
        return self.X.shape[1]

    @staticmethod
    def create(X, y, partition: GroupPartition, lam) -> "Problem":
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise DimensionError(f"X must be 2-D, got shape {X.shape}")
        y = _check_vector(y, X.shape[0], "y")
        if X.shape[1] != partition.K:
            raise DimensionError(
                f"X has {X.shape[1]} columns but the partition covers {partition.K}"
            )
        lam = _check_vector(lam, partition.M, "lambda")
        if np.any(lam < 0):
            raise DomainError("all lambda_j must be >= 0")
        return Problem(X=X, y=y, partition=partition, lam=lam)

    def objective(self, beta) -> float:
        """(1/N)||X beta - y||^2 + 2 sum_j lambda_j ||beta^j||."""
        beta = _check_vector(beta, self.K, "beta")
        r = self.X @ beta - self.y
        penalty = float(self.lam @ self.partition.group_norms(beta))
        return float(r @ r) / self.N + 2.0 * penalty


@dataclass(frozen=True)
class MultiTaskSpec:
    """T regression tasks with a shared n x M_vars design shape."""

    designs: tuple[np.ndarray, ...]
    responses: tuple[np.ndarray, ...]

    @property
    def T(self) -> int:
        return len(self.designs)

    @property
    def n(self) -> int:
        return self.designs[0].shape[0]

    @property
    def M_vars(self) -> int:
        return self.designs[0].shape[1]

    @staticmethod
    def create(designs, responses) -> "MultiTaskSpec":
        if len(designs) == 0 or len(designs) != len(responses):
            raise ShapeMismatchError("need one response per task design")
        mats = [np.ascontiguousarray(X, dtype=np.float64) for X in designs]
        shape = mats[0].shape
        if len(shape) != 2:
            raise ShapeMismatchError("task designs must be 2-D")
        for t, X in enumerate(mats):
            if X.shape != shape:
                raise ShapeMismatchError(
                    f"task {t} design has shape {X.shape}, expected {shape}"
                )
        vecs = []
        for t, y in enumerate(responses):
            y = np.asarray(y, dtype=np.float64)
            if y.ndim != 1 or y.shape[0] != shape[0]:
                raise ShapeMismatchError(
                    f"task {t} response has shape {y.shape}, expected ({shape[0]},)"
                )
            vecs.append(np.ascontiguousarray(y))
        return MultiTaskSpec(designs=tuple(mats), responses=tuple(vecs))


def assemble_multitask(spec: MultiTaskSpec):
    """Stack the tasks into one block-diagonal regression.

    Columns are laid out task-major (task t's M_vars columns contiguous);
    group j collects the j-th column of every task block, so all groups
    have size T.  Returns (X, y, partition).
    """
    T, n, M = spec.T, spec.n, spec.M_vars
    X = np.zeros((n * T, M * T))
    for t, Xt in enumerate(spec.designs):
        X[t * n : (t + 1) * n, t * M : (t + 1) * M] = Xt
    y = np.concatenate(spec.responses)
    groups = [[t * M + j for t in range(T)] for j in range(M)]
    return X, y, validate_partition(groups, M * T)


@dataclass(frozen=True)
class GramSummary:
    """Normalized Gram matrix with per-group summaries.

    ``phi`` is the common diagonal value, or None when the diagonal is not
    constant to relative tolerance PHI_DIAG_RTOL.
    """

    Psi: np.ndarray
    Psi_groups: tuple[np.ndarray, ...]
    traces: np.ndarray
    spectral_norms: np.ndarray
    phi_max: float
    phi: float | None


def gram_summary(X, partition: GroupPartition) -> GramSummary:
    """Psi = X'X/N with per-group principal submatrices and eigen summaries."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != partition.K:
        raise DimensionError(
            f"X must have {partition.K} columns, got shape {X.shape}"
        )
    N = X.shape[0]
    Psi = (X.T @ X) / N
    blocks = []
    traces = np.empty(partition.M)
    specs = np.empty(partition.M)
    for j, g in enumerate(partition.groups):
        idx = np.asarray(g)
        Pj = Psi[np.ix_(idx, idx)]
        blocks.append(Pj)
        traces[j] = np.trace(Pj)
        specs[j] = np.linalg.eigvalsh(Pj)[-1] if idx.size > 1 else Pj[0, 0]
    phi_max = float(np.linalg.eigvalsh(Psi)[-1])
    diag = np.diag(Psi)
    scale = max(abs(diag).max(), 1e-300)
    phi = float(diag[0]) if (diag.max() - diag.min()) <= PHI_DIAG_RTOL * scale else None
    return GramSummary(
        Psi=Psi,
        Psi_groups=tuple(blocks),
        traces=traces,
        spectral_norms=specs,
        phi_max=phi_max,
        phi=phi,
    )
