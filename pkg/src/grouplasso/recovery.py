"""Sparsity-pattern estimation by group-norm thresholding and data-driven
(2,p)-norm confidence radii."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import GroupPartition, _check_vector
from .tuning import threshold_constants


@dataclass(frozen=True)
class SupportEstimate:
    J_hat: frozenset[int]
    threshold: float
    group_norms: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "J_hat": sorted(int(j) for j in self.J_hat),
            "threshold": float(self.threshold),
            "group_norms": [float(v) for v in self.group_norms],
        }


def estimate_support(
    beta_hat, partition: GroupPartition, lam_max: float, phi: float, alpha: float
) -> SupportEstimate:
    """Groups whose norm strictly exceeds c * lam_max / phi."""
    if phi <= 0:
        raise DomainError(f"phi must be > 0, got {phi}")
    c, _ = threshold_constants(alpha, math.inf)
    threshold = c * lam_max / phi
    norms = partition.group_norms(beta_hat)
    J_hat = frozenset(int(j) for j in np.flatnonzero(norms > threshold))
    return SupportEstimate(J_hat=J_hat, threshold=threshold, group_norms=norms)


def min_signal_ok(
    beta_star, partition: GroupPartition, lam_max: float, phi: float, alpha: float
) -> bool:
    """True iff every nonzero group of beta_star has norm > 2 c lam_max / phi.

    Vacuously true for beta_star = 0.
    """
    if phi <= 0:
        raise DomainError(f"phi must be > 0, got {phi}")
    c, _ = threshold_constants(alpha, math.inf)
    norms = partition.group_norms(beta_star)
    active = norms[norms > 0.0]
    if active.size == 0:
        return True
    return bool(active.min() > 2.0 * c * lam_max / phi)


def pnorm_radius(lam, J, alpha: float, phi: float, p) -> float:
    """Data-driven (2,p) confidence radius around the estimate.

    radius = (c1/phi) * lam_max * (sum_{j in J} lam_j^2/(lam_min lam_max))^(1/p),
    with the sum factor taken to the power 0 at p = inf.
    """
    if phi <= 0:
        raise DomainError(f"phi must be > 0, got {phi}")
    lam = np.asarray(lam, dtype=np.float64)
    lam_min, lam_max = float(lam.min()), float(lam.max())
    _, c1 = threshold_constants(alpha, p)
    if math.isinf(p):
        return c1 * lam_max / phi
    J = sorted(int(j) for j in J)
    total = float(np.sum(lam[J] ** 2)) / (lam_min * lam_max) if J else 0.0
    return (c1 / phi) * lam_max * total ** (1.0 / p)
