"""Kernel selection: compiled Cython extension when available, NumPy otherwise.

Both implementations share the flattened-group contract and are covered by
the same tests; ``benchmarks/bench_kernels.py`` compares their speed.
"""

try:
    from ._kernels_cy import IMPL, group_norms, group_prox
except ImportError:  # extension not built
    from ._kernels_py import IMPL, group_norms, group_prox

__all__ = ["IMPL", "group_norms", "group_prox"]
