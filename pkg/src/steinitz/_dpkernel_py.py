"""Pure-numpy fallback for the subset-DP value table.

The recurrence over subsets S of {0..n-1} is

    g[0] = 0
    g[S] = max(norm[S], min over i in S of g[S without i])

Masks are processed level by level (by popcount), which lets each level be a
handful of vectorized min-reductions. Only comparisons touch the floats, so
the table is bit-identical to the compiled kernel's.
"""

from __future__ import annotations

import numpy as np


def fill_g(norms: np.ndarray, n: int) -> np.ndarray:
    full = 1 << n
    if norms.shape[0] != full:
        raise ValueError("norm table size does not match 2^n")
    g = np.empty(full, dtype=np.float64)
    g[0] = 0.0
    pc = np.zeros(full, dtype=np.uint8)
    size = 1
    while size < full:
        pc[size : 2 * size] = pc[:size] + 1
        size *= 2
    for level in range(1, n + 1):
        masks = np.nonzero(pc == level)[0]
        best = np.full(masks.shape[0], np.inf)
        for i in range(n):
            bit = 1 << i
            has = (masks & bit) != 0
            if not np.any(has):
                continue
            best[has] = np.minimum(best[has], g[masks[has] ^ bit])
        g[masks] = np.maximum(norms[masks], best)
    return g
