"""Ordering algorithms for zero-sum and near-unit vector families.

Four orderers share the OrderResult interface:

  gs_order     : the constructive ordering with guaranteed max prefix norm
                 at most d, via the Grinberg-Sevastyanov weight system. A
                 set A_k of k survivors carries weights in [0, 1] with
                 weight sum k - d and weighted vector sum zero; then
                 sum(A_k) = sum((1 - w_i) v_i) has norm at most d. Shrinking
                 the weight sum by one and walking along null directions of
                 the constraint matrix until some weight hits zero yields
                 the element to place at position k.
  drift_order  : centers and rescales an arbitrary family, runs gs_order,
                 and measures drift-adjusted prefixes; guarantee 2d times
                 the max input norm.
  greedy_order : baseline, appends the remaining vector minimizing the next
                 prefix norm. No guarantee.
  oracle_order : exact optimum by subset DP, capped at n <= 20 by default.

All tie-breaking is by lowest index, never by value, so results are
deterministic and scale-equivariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import (
    DEFAULT_TOL,
    Gauge,
    Ordering,
    VectorFamily,
    gauge_norm,
    prefix_report,
    row_norms,
    tree_sum,
)
from . import kernels

#: Weights within this distance of {0, 1} are treated as being at the bound.
BOUNDARY_TOL = 1e-9
#: A selected "zero" weight may be this large before the run is declared failed.
ZERO_WEIGHT_TOL = 1e-7
#: Feasibility is re-checked at these growing tolerances before giving up.
TOL_LADDER = (1e-9, 1e-7, 1e-5)


@dataclass(frozen=True)
class OrderResult:
    """An ordering plus its measured and (when available) guaranteed value."""

    ordering: Ordering
    achieved: float
    algo: str
    guarantee: float | None = None


@dataclass(frozen=True)
class WeightState:
    """Support indices and their weights for the shrinking weight system."""

    support: np.ndarray  # sorted family indices
    weights: np.ndarray  # aligned with support, values in [0, 1]

    def __post_init__(self):
        s = np.array(self.support, dtype=np.int64, copy=True)
        w = np.array(self.weights, dtype=np.float64, copy=True)
        if s.ndim != 1 or w.shape != s.shape:
            raise ValueError("support and weights must be aligned 1-D arrays")
        if s.size and np.any(np.diff(s) <= 0):
            raise ValueError("support must be strictly increasing")
        s.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "weights", w)

    def fractional_count(self, tol: float = BOUNDARY_TOL) -> int:
        w = self.weights
        return int(np.sum((w > tol) & (w < 1.0 - tol)))


def _constraint_residual(weights, vecs, target_sum):
    r_vec = vecs.T @ weights
    r_sum = float(np.sum(weights)) - target_sum
    return float(np.sqrt(r_vec @ r_vec + r_sum * r_sum))


def _check_feasible(weights, vecs, target_sum, context: str):
    if np.any(weights < -TOL_LADDER[-1]) or np.any(weights > 1.0 + TOL_LADDER[-1]):
        raise ValueError(f"{context}: weights leave [0, 1]")
    resid = _constraint_residual(weights, vecs, target_sum)
    scale = max(1.0, float(len(weights)))
    for tol in TOL_LADDER:
        if resid <= tol * scale:
            return
    raise ValueError(f"{context}: constraint residual {resid:.3e} beyond tolerance ladder")


def _kernel_vector(mat: np.ndarray) -> np.ndarray:
    """A nonzero null-space vector of a wide matrix via column-pivoted QR."""
    rows, cols = mat.shape
    q, r, piv = scipy.linalg.qr(mat, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    top = diag[0] if diag.size else 0.0
    rank = int(np.sum(diag > top * max(rows, cols) * 1e-13)) if top > 0.0 else 0
    if rank >= cols:
        raise np.linalg.LinAlgError("matrix has no numeric null space")
    z_perm = np.zeros(cols)
    if rank > 0:
        z_perm[:rank] = scipy.linalg.solve_triangular(r[:rank, :rank], -r[:rank, rank])
    z_perm[rank] = 1.0
    z = np.zeros(cols)
    z[piv] = z_perm
    z /= np.max(np.abs(z))
    return z


def _repair(weights, frac_idx, vecs, target_sum):
    """Least-squares re-tightening of the constraints on fractional weights."""
    fixed = np.ones(len(weights), dtype=bool)
    fixed[frac_idx] = False
    ones_contrib = tree_sum(vecs[fixed & (weights > 0.5)])
    n_ones = float(np.sum(weights[fixed] > 0.5))
    mat = np.vstack([vecs[frac_idx].T, np.ones(len(frac_idx))])
    b = np.concatenate([-ones_contrib, [target_sum - n_ones]])
    resid = b - mat @ weights[frac_idx]
    delta, *_ = np.linalg.lstsq(mat, resid, rcond=None)
    cand = weights[frac_idx] + delta
    if np.all(cand > -TOL_LADDER[1]) and np.all(cand < 1.0 + TOL_LADDER[1]):
        weights[frac_idx] = np.clip(cand, 0.0, 1.0)


def _walk_to_vertex(weights, vecs, target_sum, stop_on_zero: bool) -> np.ndarray:
    """Drive weights along constraint-kernel directions until few are fractional.

    Each step moves as far as possible along a null direction of the
    (d+1) x f constraint matrix restricted to fractional coordinates, fixing
    at least one more weight at a bound. With ``stop_on_zero`` the walk
    returns as soon as any weight reaches zero (sufficient for the orderer:
    whenever no weight is zero, at least d+2 weights are fractional, so a
    null direction always exists).
    """
    d = vecs.shape[1]
    weights = weights.copy()
    while True:
        if stop_on_zero and np.any(weights <= BOUNDARY_TOL):
            break
        frac = np.nonzero((weights > BOUNDARY_TOL) & (weights < 1.0 - BOUNDARY_TOL))[0]
        if frac.size <= d + 1:
            if frac.size:
                _repair(weights, frac, vecs, target_sum)
            break
        z = _kernel_vector(np.vstack([vecs[frac].T, np.ones(frac.size)]))
        w_f = weights[frac]
        with np.errstate(divide="ignore"):
            step_hi = np.where(z > 1e-14, (1.0 - w_f) / np.where(z > 1e-14, z, 1.0), np.inf)
            step_lo = np.where(z < -1e-14, w_f / np.where(z < -1e-14, -z, 1.0), np.inf)
        theta = min(float(np.min(step_hi)), float(np.min(step_lo)))
        if not np.isfinite(theta):
            raise np.linalg.LinAlgError("degenerate null direction (all components vanish)")
        w_f = w_f + theta * z
        w_f[w_f <= BOUNDARY_TOL] = 0.0
        w_f[w_f >= 1.0 - BOUNDARY_TOL] = 1.0
        weights[frac] = w_f
    weights[weights <= BOUNDARY_TOL] = np.where(
        weights[weights <= BOUNDARY_TOL] < 0.5, 0.0, weights[weights <= BOUNDARY_TOL]
    )
    return weights


def vertexify(state: WeightState, family: VectorFamily, target_sum: float) -> WeightState:
    """Reduce a feasible weight state to one with at most d+1 fractional weights.

    The constraints (weights in [0, 1], weight sum equal to ``target_sum``,
    weighted vector sum zero) are preserved to within the tolerance ladder.
    A state that already satisfies the fractional bound is returned as is.
    """
    vecs = family.vectors[state.support]
    d = family.dim
    _check_feasible(state.weights, vecs, target_sum, "vertexify input")
    if state.fractional_count() <= d + 1:
        return state
    w = _walk_to_vertex(state.weights, vecs, target_sum, stop_on_zero=False)
    _check_feasible(w, vecs, target_sum, "vertexify output")
    return WeightState(state.support, w)


def _validate_zero_sum(family: VectorFamily, tol: float, context: str):
    total = tree_sum(family.vectors)
    if gauge_norm(total, family.gauge) > tol * max(1.0, family.n):
        raise ValueError(f"{context} requires a zero-sum family")


def gs_order(family: VectorFamily, tol: float = DEFAULT_TOL) -> OrderResult:
    """Constructive ordering of a zero-sum family with max prefix norm <= d.

    Maintains the weight system on shrinking survivor sets A_k for k from n
    down to d: scale the weights by (k-1-d)/(k-d), walk until some weight is
    zero, remove that index and assign it position k. Positions 1..d are the
    final survivors in ascending index order. The invariant
    ||sum(A_k)|| <= d is checked at every step.
    """
    n, d = family.n, family.dim
    if n < 1:
        raise ValueError("ordering requires at least one vector")
    norms = family.norms()
    if np.any(norms > 1.0 + tol):
        raise ValueError("gs_order requires all norms <= 1")
    _validate_zero_sum(family, tol, "gs_order")

    if n <= d:
        ordering = Ordering(np.arange(n), drift=False)
        achieved = prefix_report(family, ordering).max_norm
        return OrderResult(ordering, achieved, "gs", guarantee=float(d))

    # Work on a max-norm-normalized copy so the walk (and hence the returned
    # permutation) is invariant under uniform scaling of the input.
    scale = float(np.max(norms))
    work = family.vectors / scale if scale > 0.0 else family.vectors

    perm = np.empty(n, dtype=np.int64)
    support = np.arange(n)
    weights = np.full(n, (n - d) / n, dtype=np.float64)

    def survivor_norm_ok(sup):
        return gauge_norm(tree_sum(work[sup]), family.gauge) <= d + 1e-6

    if not survivor_norm_ok(support):
        raise ValueError("gs_order: initial survivor sum violates the d bound")

    for k in range(n, d, -1):
        weights = weights * ((k - 1 - d) / (k - d))
        j = int(np.argmin(weights))
        if weights[j] > BOUNDARY_TOL:
            weights = _walk_to_vertex(weights, work[support], k - 1 - d, stop_on_zero=True)
            _check_feasible(weights, work[support], k - 1 - d, f"gs_order step k={k}")
            j = int(np.argmin(weights))
        if weights[j] > ZERO_WEIGHT_TOL:
            raise RuntimeError(
                f"gs_order: no zero weight at step k={k} (min {weights[j]:.2e}); "
                "numerical failure of the null-space walk"
            )
        perm[k - 1] = support[j]
        support = np.delete(support, j)
        weights = np.delete(weights, j)
        if not survivor_norm_ok(support):
            raise RuntimeError(f"gs_order: survivor sum exceeded d at k={k - 1}")

    perm[:d] = support  # ascending index order
    ordering = Ordering(perm, drift=False)
    achieved = prefix_report(family, ordering).max_norm
    return OrderResult(ordering, achieved, "gs", guarantee=float(d))


def drift_order(family: VectorFamily, tol: float = DEFAULT_TOL) -> OrderResult:
    """Order an arbitrary family for small drift-adjusted prefixes.

    Centers the family (making it zero-sum, norms at most doubled), rescales
    to the unit ball, runs gs_order, and maps the permutation back. The
    drift-adjusted prefixes of the original family coincide with the plain
    prefixes of the centered one, so the guarantee is 2d times the max input
    norm.
    """
    n, d = family.n, family.dim
    if n < 1:
        raise ValueError("ordering requires at least one vector")
    max_in = family.max_norm()
    centered = family.vectors - tree_sum(family.vectors) / n
    max_c = float(np.max(row_norms(centered, family.gauge)))
    if max_c <= 1e-15 * max(1.0, max_in):
        perm = np.arange(n)  # all vectors identical; every prefix drifts by zero
    else:
        inner = VectorFamily(centered / max_c, family.gauge)
        perm = gs_order(inner, tol).ordering.perm
    ordering = Ordering(perm, drift=True)
    achieved = prefix_report(family, ordering).max_norm
    return OrderResult(ordering, achieved, "drift", guarantee=2.0 * d * max_in)


def greedy_order(family: VectorFamily) -> OrderResult:
    """Baseline: repeatedly append the vector minimizing the next prefix norm."""
    n = family.n
    if n < 1:
        raise ValueError("ordering requires at least one vector")
    remaining = np.arange(n)
    perm = np.empty(n, dtype=np.int64)
    current = np.zeros(family.dim)
    for pos in range(n):
        cand = row_norms(current + family.vectors[remaining], family.gauge)
        j = int(np.argmin(cand))  # first minimum, so lowest index wins ties
        perm[pos] = remaining[j]
        current = current + family.vectors[remaining[j]]
        remaining = np.delete(remaining, j)
    ordering = Ordering(perm, drift=False)
    achieved = prefix_report(family, ordering).max_norm
    return OrderResult(ordering, achieved, "greedy", guarantee=None)


#: Default cap on the exact oracle; the value table is 8 * 2^n bytes.
ORACLE_DEFAULT_CAP = 20


def oracle_order(
    family: VectorFamily,
    drift: bool = False,
    cap: int = ORACLE_DEFAULT_CAP,
    backend: str | None = None,
) -> OrderResult:
    """Exact optimal ordering by dynamic programming over subsets.

    Minimizes the maximum (drift-adjusted when requested) prefix norm.
    Refuses families above the cap rather than allocating 2^n tables.
    """
    n = family.n
    if n < 1:
        raise ValueError("ordering requires at least one vector")
    if n > cap:
        raise ValueError(f"oracle refuses n={n} > cap={cap} (table would be 2^{n} entries)")
    dp_value, perm = kernels.solve_min_max_order(family.vectors, family.gauge, drift, backend)
    ordering = Ordering(perm, drift=drift)
    achieved = prefix_report(family, ordering).max_norm
    if abs(achieved - dp_value) > 1e-9 * max(1.0, abs(dp_value)):
        raise RuntimeError("oracle DP value disagrees with prefix re-evaluation")
    return OrderResult(ordering, achieved, "oracle", guarantee=None)
