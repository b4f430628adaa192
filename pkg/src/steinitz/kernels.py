"""Subset-sum tables and the min-max DP kernel, with backend selection.

The compiled Cython kernel is preferred when the extension was built;
otherwise the vectorized numpy fallback is used. Both consume the same
precomputed per-mask norm table and perform only comparisons on it, so the
value tables (and hence the recovered permutations) are bit-identical.
"""

from __future__ import annotations

import numpy as np

from .core import Gauge, row_norms, tree_sum

try:  # selected at import time
    from . import _dpkernel as _fast

    _HAVE_FAST = True
except ImportError:  # extension not built; pure-python lane
    _fast = None
    _HAVE_FAST = False

from . import _dpkernel_py as _pure

DEFAULT_BACKEND = "cython" if _HAVE_FAST else "numpy"


def available_backends() -> tuple[str, ...]:
    return ("cython", "numpy") if _HAVE_FAST else ("numpy",)


def backend_name() -> str:
    return DEFAULT_BACKEND


def popcounts(size: int) -> np.ndarray:
    """Popcount of every mask in [0, size); size must be a power of two."""
    pc = np.zeros(size, dtype=np.uint8)
    block = 1
    while block < size:
        pc[block : 2 * block] = pc[:block] + 1
        block *= 2
    return pc


def subset_sums(vectors: np.ndarray) -> np.ndarray:
    """(2^n, d) table of subset sums, built one bit-wave at a time.

    Mask m's row is the sum of rows i with bit i set; each wave extends the
    table by adding one vector to every previous row, so the fill is n
    vectorized adds.
    """
    n, d = vectors.shape
    table = np.zeros((1 << n, d), dtype=np.float64)
    for i in range(n):
        lo = 1 << i
        table[lo : 2 * lo] = table[:lo] + vectors[i]
    return table


def subset_norm_table(vectors: np.ndarray, gauge: Gauge, drift: bool) -> np.ndarray:
    """Per-mask gauge norms of (optionally drift-adjusted) subset sums.

    In drift mode each subset sum is shifted by -(|S|/n) * total, using the
    full-mask row of the table itself as the total so the full mask lands on
    exactly zero.
    """
    n = vectors.shape[0]
    sums = subset_sums(vectors)
    if drift:
        pc = popcounts(1 << n).astype(np.float64)
        sums = sums - (pc / n)[:, None] * sums[-1]
    return row_norms(sums, gauge)


def fill_g(norms: np.ndarray, n: int, backend: str | None = None) -> np.ndarray:
    """Fill the min-max DP table over all masks; see the kernel docstrings."""
    norms = np.ascontiguousarray(norms, dtype=np.float64)
    if backend is None:
        backend = DEFAULT_BACKEND
    if backend == "cython":
        if not _HAVE_FAST:
            raise ValueError("cython backend requested but the extension is not built")
        return np.asarray(_fast.fill_g(norms, n))
    if backend == "numpy":
        return _pure.fill_g(norms, n)
    raise ValueError(f"unknown backend {backend!r}")


def backtrack(g: np.ndarray, n: int) -> np.ndarray:
    """Recover the optimal permutation from a filled value table.

    Walking down from the full mask, the element placed at position |S| is
    the set bit whose removal minimizes g; ties go to the lowest index.
    """
    perm = np.empty(n, dtype=np.int64)
    m = (1 << n) - 1
    for pos in range(n - 1, -1, -1):
        best_i = -1
        best_v = np.inf
        for i in range(n):
            bit = 1 << i
            if m & bit and g[m ^ bit] < best_v:
                best_v = g[m ^ bit]
                best_i = i
        perm[pos] = best_i
        m ^= 1 << best_i
    return perm


def solve_min_max_order(
    vectors: np.ndarray, gauge: Gauge, drift: bool, backend: str | None = None
) -> tuple[float, np.ndarray]:
    """Exact minimum over permutations of the max (adjusted) prefix norm.

    Returns the optimal value as computed inside the DP (the reporting layer
    re-evaluates the permutation through the canonical prefix scan) and the
    optimal permutation.
    """
    n = vectors.shape[0]
    norms = subset_norm_table(vectors, gauge, drift)
    g = fill_g(norms, n, backend)
    return float(g[-1]), backtrack(g, n)


__all__ = [
    "available_backends",
    "backend_name",
    "backtrack",
    "fill_g",
    "popcounts",
    "solve_min_max_order",
    "subset_norm_table",
    "subset_sums",
    "DEFAULT_BACKEND",
]
