"""Timing comparison of the compiled and pure-NumPy group kernels.

Run:  python3 benchmarks/bench_kernels.py [--sizes small,medium,large]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from grouplasso._kern import _kernels_py

try:
    from grouplasso._kern import _kernels_cy
except ImportError:
    _kernels_cy = None

SIZES = {
    "small": (256, 32),
    "medium": (4096, 512),
    "large": (65536, 8192),
}


def flat_partition(K: int, M: int, rng):
    """Random partition of 0..K-1 into M groups, flattened form."""
    perm = rng.permutation(K)
    cuts = np.sort(rng.choice(np.arange(1, K), size=M - 1, replace=False))
    groups = np.split(perm, cuts)
    indices = np.concatenate(groups)
    offsets = np.zeros(M + 1, dtype=np.int64)
    np.cumsum([g.size for g in groups], out=offsets[1:])
    return indices.astype(np.int64), offsets


def bench(fn, *args, repeat: int = 5, inner: int = 50) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="small,medium,large")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    impls = [("numpy", _kernels_py)]
    if _kernels_cy is not None:
        impls.append(("cython", _kernels_cy))
    else:
        print("compiled kernels unavailable; benchmarking the fallback only")

    header = f"{'case':>22}" + "".join(f"{name:>12}" for name, _ in impls)
    print(header + ("     speedup" if len(impls) == 2 else ""))
    for size in args.sizes.split(","):
        K, M = SIZES[size]
        indices, offsets = flat_partition(K, M, rng)
        v = rng.standard_normal(K)
        thresholds = np.abs(rng.standard_normal(M))
        for op in ("group_norms", "group_prox"):
            times = []
            for _, mod in impls:
                fn = getattr(mod, op)
                a = (v, indices, offsets) if op == "group_norms" else (
                    v, indices, offsets, thresholds
                )
                times.append(bench(fn, *a))
            row = f"{size + ':' + op:>22}" + "".join(f"{t * 1e6:>10.1f}us" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>11.1f}x"
            print(row)


if __name__ == "__main__":
    main()
