"""Shared test helpers.

The brute-force reference orderer below is deliberately independent of the
package (its own norm code, plain left-to-right accumulation over explicit
permutations); it is the oracle the fast paths are checked against.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def ref_norm(vec, p) -> float:
    if p == 1.0:
        return float(sum(abs(x) for x in vec))
    if math.isinf(p):
        return float(max(abs(x) for x in vec))
    if p == 2.0:
        return math.sqrt(float(sum(x * x for x in vec)))
    return float(sum(abs(x) ** p for x in vec)) ** (1.0 / p)


def ref_max_prefix(vectors, perm, p, drift=False) -> float:
    vectors = np.asarray(vectors, dtype=float)
    n, d = vectors.shape
    total = vectors.sum(axis=0)
    acc = np.zeros(d)
    worst = 0.0
    for k, i in enumerate(perm, start=1):
        acc = acc + vectors[i]
        point = acc - (k / n) * total if drift else acc
        worst = max(worst, ref_norm(point, p))
    return worst


def brute_force_min_max(vectors, p, drift=False) -> tuple[float, tuple[int, ...]]:
    """Exact optimum over all permutations; keeps the first optimal one."""
    vectors = np.asarray(vectors, dtype=float)
    n = vectors.shape[0]
    best = math.inf
    best_perm = tuple(range(n))
    for perm in itertools.permutations(range(n)):
        val = ref_max_prefix(vectors, perm, p, drift)
        if val < best:
            best = val
            best_perm = perm
    return best, best_perm
