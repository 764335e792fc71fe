"""Design-matrix diagnostics: coherence margin, restricted-eigenvalue
estimates (certified and sampled), restricted min/max eigenvalues over
group subsets, and the bounded-design constant for non-Gaussian noise."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from itertools import combinations

import numpy as np

from .errors import (
    CombinatorialBlowupError,
    DegenerateError,
    DomainError,
    NonConstantDiagonalError,
)
from .model import GramSummary, GroupPartition, MultiTaskSpec, _check_vector

ENUMERATION_BUDGET = 10**6


def coherence_alpha(gram: GramSummary, partition: GroupPartition, lam, s: int) -> float:
    """Largest alpha for which all three coherence inequalities hold.

    The bound on every Gram entry scales as 1/alpha, so the largest
    admissible alpha is the minimum over entries of bound(alpha=1)/|entry|.
    Returns inf when every constrained entry is zero; values < 1 are
    returned as-is (the caller decides admissibility).
    """
    if s < 1:
        raise DomainError(f"s must be >= 1, got {s}")
    if gram.phi is None:
        raise NonConstantDiagonalError("coherence check needs a constant Gram diagonal")
    lam = _check_vector(lam, partition.M, "lambda")
    lam_min, lam_max = float(lam.min()), float(lam.max())
    if lam_max <= 0:
        raise DomainError("coherence check needs lambda_max > 0")
    base = lam_min * gram.phi / (14.0 * lam_max * s)

    alpha = math.inf
    M = partition.M
    sizes = partition.sizes
    groups = [np.asarray(g) for g in partition.groups]
    Psi = gram.Psi
    for j in range(M):
        # within-group off-diagonals, weight 1/K_j (the j'=j reading)
        Pjj = Psi[np.ix_(groups[j], groups[j])]
        off = np.abs(Pjj - np.diag(np.diag(Pjj)))
        worst = off.max() if off.size else 0.0
        if worst > 0:
            alpha = min(alpha, base / sizes[j] / worst)
        for jp in range(j + 1, M):
            B = Psi[np.ix_(groups[j], groups[jp])]
            m = min(sizes[j], sizes[jp])
            aligned = np.abs(np.diagonal(B[:m, :m])).max() if m else 0.0
            if aligned > 0:
                alpha = min(alpha, base / aligned)
            mask = np.ones(B.shape, dtype=bool)
            mask[np.arange(m), np.arange(m)] = False
            if mask.any():
                worst = np.abs(B[mask]).max()
                if worst > 0:
                    w = 1.0 / math.sqrt(sizes[j] * sizes[jp])
                    alpha = min(alpha, base * w / worst)
    return alpha


def re_from_coherence(alpha: float, phi: float) -> float:
    """Certified restricted-eigenvalue lower bound sqrt((1 - 1/alpha) phi)."""
    if alpha <= 1:
        raise DomainError(f"alpha must be > 1, got {alpha}")
    if phi <= 0:
        raise DomainError(f"phi must be > 0, got {phi}")
    return math.sqrt((1.0 - 1.0 / alpha) * phi)


def re_sampled(
    X,
    partition: GroupPartition,
    lam,
    s: int,
    cone_factor: float = 3.0,
    n_samples: int = 1000,
    seed: int = 0,
) -> float:
    """Sampled upper estimate of the restricted-eigenvalue constant.

    Draws random (J, Delta) pairs with |J| = min(s, M) and the off-support
    weighted group norm at most cone_factor times the on-support one, and
    returns the minimum of ||X Delta|| / (sqrt(N) ||Delta_J||).  Off-support
    mass is placed on the cone boundary and in its interior, 50/50: odd
    samples sit exactly on the boundary, even samples use the interior point
    minimizing ||X Delta|| over per-group scalings of the drawn directions,
    shrunk to the cone budget (the first sample is the Delta_{J^c} = 0
    corner).
    """
    X = np.asarray(X, dtype=np.float64)
    lam = _check_vector(lam, partition.M, "lambda")
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    N = X.shape[0]
    rng = np.random.default_rng(seed)
    s_eff = min(s, partition.M)
    groups = [np.asarray(g) for g in partition.groups]

    best = math.inf
    any_on = False
    for i in range(n_samples):
        J = rng.choice(partition.M, size=s_eff, replace=False)
        Jc = np.setdiff1d(np.arange(partition.M), J)
        delta = np.zeros(partition.K)
        for j in J:
            delta[groups[j]] = rng.standard_normal(groups[j].size)
        on_norm = math.sqrt(sum(float(delta[groups[j]] @ delta[groups[j]]) for j in J))
        if on_norm == 0.0:
            continue
        any_on = True
        on_weighted = sum(lam[j] * np.linalg.norm(delta[groups[j]]) for j in J)
        a = X @ delta
        val = float(a @ a)
        budget = cone_factor * on_weighted
        if Jc.size and budget > 0 and i > 0:
            dirs = [rng.standard_normal(groups[j].size) for j in Jc]
            weights = np.array(
                [lam[j] * np.linalg.norm(d) for j, d in zip(Jc, dirs)]
            )
            live = weights > 0
            if live.any():
                B = np.stack(
                    [X[:, groups[j]] @ d for j, d, ok in zip(Jc, dirs, live) if ok],
                    axis=1,
                )
                w = weights[live]
                if i % 2 == 1:
                    # boundary ray: equal per-group scales out to the cone
                    # edge, evaluated at the segment minimum so a larger
                    # cone can only lower the sample value
                    b = B.sum(axis=1)
                    bb = float(b @ b)
                    t_edge = budget / float(w.sum())
                    t = min(max(-float(a @ b) / bb, 0.0), t_edge) if bb > 0 else 0.0
                    r = a + t * b
                else:
                    # interior: least-squares scales per group, shrunk so the
                    # weighted off-support norm stays within the budget
                    u = np.linalg.lstsq(B, -a, rcond=None)[0]
                    spent = float(np.abs(u) @ w)
                    t = min(1.0, budget / spent) if spent > 0 else 0.0
                    r = a + B @ (t * u)
                val = min(val, float(r @ r))
        best = min(best, math.sqrt(max(val, 0.0)) / (math.sqrt(N) * on_norm))

    if not any_on:
        raise DegenerateError("every sampled on-support block was zero")
    return float(best)


def restricted_eigenvalues(X, partition: GroupPartition, s: int, n_norm: int | None = None):
    """Exact min/max eigenvalue extremes over all 2s-group column subsets.

    Returns (kappa1, kappa2) with kappa1^2 / kappa2^2 the smallest /
    largest eigenvalue of any principal submatrix of X'X/n on the columns
    of min(2s, M) groups.
    """
    X = np.asarray(X, dtype=np.float64)
    if 2 * s > partition.M:
        raise DomainError(f"need 2s <= M, got s={s}, M={partition.M}")
    m = min(2 * s, partition.M)
    if math.comb(partition.M, m) > ENUMERATION_BUDGET:
        raise CombinatorialBlowupError(
            f"C({partition.M},{m}) subsets exceed the budget of {ENUMERATION_BUDGET}; "
            "use the sampled estimate instead"
        )
    n = n_norm if n_norm is not None else X.shape[0]
    G = (X.T @ X) / n
    groups = [np.asarray(g) for g in partition.groups]
    lo, hi = math.inf, -math.inf
    for S in combinations(range(partition.M), m):
        cols = np.concatenate([groups[j] for j in S])
        evals = np.linalg.eigvalsh(G[np.ix_(cols, cols)])
        lo = min(lo, float(evals[0]))
        hi = max(hi, float(evals[-1]))
    return math.sqrt(max(lo, 0.0)), math.sqrt(max(hi, 0.0))


def x_star(spec: MultiTaskSpec) -> float:
    """Smallest bound with max_t (1/n) sum_i max_j x_tij^2 <= x_*^2."""
    worst = 0.0
    for Xt in spec.designs:
        worst = max(worst, float(np.mean(np.max(Xt * Xt, axis=1))))
    return math.sqrt(worst)


@dataclass(frozen=True)
class DiagnosticsReport:
    phi: float | None
    phi_max: float
    coherence_alpha: float
    kappa_cert: float | None
    kappa_sampled: float
    kappa1: float | None
    kappa2: float | None
    x_star: float | None
    s: int
    cone_factor: float

    def to_json_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(d["coherence_alpha"]):
            d["coherence_alpha"] = "inf"
        return d


def diagnose(
    X,
    partition: GroupPartition,
    lam,
    s: int,
    cone_factor: float = 3.0,
    n_samples: int = 1000,
    seed: int = 0,
    spec: MultiTaskSpec | None = None,
    n_norm: int | None = None,
) -> DiagnosticsReport:
    """Run the full diagnostics battery on one design."""
    from .model import gram_summary

    gram = gram_summary(X, partition)
    try:
        alpha = coherence_alpha(gram, partition, lam, s)
    except NonConstantDiagonalError:
        alpha = float("nan")
    kappa_cert = None
    if alpha > 1 and gram.phi is not None:
        kappa_cert = re_from_coherence(alpha, gram.phi)
    kappa_sampled = re_sampled(X, partition, lam, s, cone_factor, n_samples, seed)
    try:
        kappa1, kappa2 = restricted_eigenvalues(X, partition, s, n_norm=n_norm)
    except (CombinatorialBlowupError, DomainError):
        kappa1 = kappa2 = None
    return DiagnosticsReport(
        phi=gram.phi,
        phi_max=gram.phi_max,
        coherence_alpha=alpha,
        kappa_cert=kappa_cert,
        kappa_sampled=kappa_sampled,
        kappa1=kappa1,
        kappa2=kappa2,
        x_star=x_star(spec) if spec is not None else None,
        s=s,
        cone_factor=cone_factor,
    )
