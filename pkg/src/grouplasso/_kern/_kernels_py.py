"""Pure-NumPy group kernels (fallback when the Cython extension is absent).

Groups are passed in flattened form: ``indices`` is the concatenation of the
group index lists and ``offsets`` (length M+1) delimits each group inside it.
"""

import numpy as np

IMPL = "numpy"


def group_norms(v, indices, offsets):
    """Euclidean norm of each group block of ``v``."""
    gathered = v[indices]
    sums = np.add.reduceat(gathered * gathered, offsets[:-1])
    return np.sqrt(sums)


def group_prox(z, indices, offsets, thresholds):
    """Block soft-thresholding: per group, shrink the norm by its threshold.

    Returns max(0, 1 - t_j/||z^j||) * z^j per group (0 for a zero block).
    """
    gathered = z[indices]
    norms = group_norms(z, indices, offsets)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = 1.0 - thresholds / norms
    scale[~np.isfinite(scale)] = 0.0
    np.maximum(scale, 0.0, out=scale)
    sizes = np.diff(offsets)
    out = np.empty_like(z)
    out[indices] = gathered * np.repeat(scale, sizes)
    return out
