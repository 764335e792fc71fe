"""Closed-form tuning parameters and constants: per-group penalties for
Gaussian noise, the multi-task penalty, the fourth-moment (non-Gaussian)
penalty, thresholding constants and the maximal-moment constant."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import GramSummary


def lambda_groups(sigma: float, N: int, M: int, q: float, gram: GramSummary) -> np.ndarray:
    """Smallest admissible per-group penalties for Gaussian noise.

    lambda_j = (2 sigma/sqrt(N)) *
               sqrt(tr(Psi_j) + 2 |||Psi_j||| (2 q log M + sqrt(K_j q log M)))

    Valid with probability at least 1 - 2 M^(1-q).
    """
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")
    if q <= 1:
        raise DomainError(f"q must be > 1, got {q}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    qlm = q * math.log(M)
    sizes = np.array([P.shape[0] for P in gram.Psi_groups], dtype=np.float64)
    inner = gram.traces + 2.0 * gram.spectral_norms * (2.0 * qlm + np.sqrt(sizes * qlm))
    return (2.0 * sigma / math.sqrt(N)) * np.sqrt(inner)


@dataclass(frozen=True)
class TunedLambda:
    value: float
    probability: float
    vacuous: bool = False


def lambda_multitask(sigma: float, n: int, T: int, M: int, A: float) -> TunedLambda:
    """Common multi-task penalty 2*sqrt(2)*sigma/sqrt(nT) * (1 + A log M / T)^(1/2).

    Holds with probability at least 1 - 2 M^(1 - 2A/5); requires A > 5/2.
    """
    if A <= 2.5:
        raise DomainError(f"A must be > 5/2, got {A}")
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    lam = 2.0 * math.sqrt(2.0) * sigma / math.sqrt(n * T) * math.sqrt(
        1.0 + A * math.log(M) / T
    )
    prob = 1.0 - 2.0 * M ** (1.0 - 2.0 * A / 5.0)
    return TunedLambda(value=lam, probability=prob)


def lambda_nongaussian(x_star: float, b: float, n: int, T: int, M: int, delta: float) -> TunedLambda:
    """Penalty for independent noise with bounded fourth moment.

    lambda = x_* b / sqrt(nT) * (1 + (log M)^(3/2+delta)/sqrt(T))^(1/2).

    The associated guarantee probability can be negative at small M; the
    result is then flagged vacuous (the formula itself stays valid).
    """
    if delta <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")
    logm_pow = math.log(M) ** (1.5 + delta)
    lam = x_star * b / math.sqrt(n * T) * math.sqrt(1.0 + logm_pow / math.sqrt(T))
    prob = 1.0 - 4.0 * math.sqrt(math.log(2 * M)) * math.sqrt(
        (8.0 * math.log(12 * M)) ** 2 + 1.0
    ) / logm_pow
    return TunedLambda(value=lam, probability=prob, vacuous=prob <= 0.0)


def threshold_constants(alpha: float, p) -> tuple[float, float]:
    """Constants (c, c1) used by support thresholding and (2,p) radii.

    c  = 3/2 + 16/(7(alpha-1))
    c1 = (16 alpha/(alpha-1))^(1/p) * c^(1-1/p),  with x^(1/inf) = 1.
    """
    if alpha <= 1:
        raise DomainError(f"alpha must be > 1, got {alpha}")
    if not (p >= 1):
        raise DomainError(f"p must lie in [1, inf], got {p}")
    c = 1.5 + 16.0 / (7.0 * (alpha - 1.0))
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    c1 = (16.0 * alpha / (alpha - 1.0)) ** inv_p * c ** (1.0 - inv_p)
    return c, c1


def moment_constant(m: float, M: int) -> float:
    """Smallest c with e^(m-1) - 1 <= (c-2) M, namely 2 + (e^(m-1)-1)/M."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    return 2.0 + (math.exp(m - 1.0) - 1.0) / M
