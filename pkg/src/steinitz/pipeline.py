"""End-to-end reduction: partition, compress, order, expand, certify.

Each partition group alpha is compressed to w_alpha = eps * sum(group), a
nearly unit vector (norm in [1 - eps, 1] by group property (ii)). Ordering
the w family with small drift-adjusted prefixes and expanding group blocks
in that order, followed by the residual, yields an ordering of the original
family whose every prefix norm is certified against

    (1/eps) * (C_W + 1/t + 1/sigma_t)

where C_W is the measured drift constant of the w ordering and sigma_t the
spherical-cap measure at the partition height. The certificate is per run
and unconditional: no unknown constant enters, only measured quantities and
the cap quadrature.

Prefixes split into two types: those ending inside or at the boundary of a
group block, and those inside the residual tail. Per-type bounds are
reported alongside the global one; the pass verdict is the global bound
only, since the per-type bounds inherit the (heuristically searched)
residual property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capgeo import CapQuery, auto_t, cap_measure
from .core import (
    DEFAULT_TOL,
    Gauge,
    Ordering,
    VectorFamily,
    prefix_report,
    tree_prefix_sums,
    tree_sum,
)
from .ordering import OrderResult, drift_order
from .partition import PartitionResult, WitnessSearchConfig, partition


@dataclass(frozen=True)
class WFamily:
    """The compressed family: one nearly unit vector per partition group."""

    w_vectors: VectorFamily
    eps: float
    group_map: tuple[int, ...]  # w index -> group index in the partition


@dataclass(frozen=True)
class CertReport:
    """Certified prefix bound decomposition for one pipeline run."""

    prefix_max: float
    c_w: float
    inv_t: float
    inv_sigma_t: float
    bound: float
    type_a_max: float
    type_b_max: float
    passed: bool
    # Per-type bounds are informational: they presume the residual property,
    # which is only certified when the residual was verified exactly.
    type_a_bound: float
    type_a_ok: bool
    type_b_bound: float
    type_b_ok: bool
    max_group_partial: float
    steinitz_bound: float
    steinitz_dominates: bool
    sigma: float
    sigma_error: float
    eps: float
    t: float
    d: int
    n: int
    n_groups: int
    residual_size: int


@dataclass(frozen=True)
class ReduceResult:
    ordering: Ordering
    partition: PartitionResult
    w_family: WFamily
    w_order: OrderResult


def _l2(v: np.ndarray) -> float:
    return float(np.sqrt(v @ v))


def build_w(part: PartitionResult, family: VectorFamily) -> WFamily:
    """Compress each group to eps * sum(group) and check the norm window.

    A norm outside [1 - eps, 1] signals an upstream partition bug. For
    zero-sum input, sum(W) = -eps * sum(residual) is verified as well.
    """
    eps = part.eps
    rows = np.zeros((len(part.groups), family.dim))
    for i, grp in enumerate(part.groups):
        rows[i] = eps * tree_sum(family.vectors[grp.indices])
    norms = np.sqrt(np.einsum("ij,ij->i", rows, rows))
    if rows.shape[0] and not np.all((norms >= 1.0 - eps - 1e-9) & (norms <= 1.0 + 1e-9)):
        raise RuntimeError("w norm outside [1-eps, 1]: partition property (ii) violated upstream")
    total_v = tree_sum(family.vectors)
    if _l2(total_v) <= DEFAULT_TOL * max(1.0, family.n):
        gap = tree_sum(rows) + eps * tree_sum(family.vectors[part.residual])
        if _l2(gap) > 1e-9:
            raise RuntimeError("sum(W) != -eps * sum(residual) beyond tolerance")
    return WFamily(VectorFamily(rows, Gauge.euclidean()), eps, tuple(range(len(part.groups))))


def _trivial_w_order() -> OrderResult:
    return OrderResult(Ordering(np.zeros(0, dtype=np.int64), drift=True), 0.0, "drift", 0.0)


def reduce_order(
    family: VectorFamily,
    eps: float,
    t: float | str = "auto",
    cfg: WitnessSearchConfig | None = None,
    tol: float = DEFAULT_TOL,
) -> ReduceResult:
    """Run the full construction and emit the ordering of the input family.

    ``t`` may be a number in (0, 1), "auto" (the standard height schedule),
    or "refined". Group blocks appear in the w ordering's order, members
    ascending by index inside each block, then the residual ascending.
    """
    if family.gauge.p != 2.0:
        raise ValueError("the reduction pipeline works in the Euclidean gauge")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if isinstance(t, str):
        if t not in ("auto", "refined"):
            raise ValueError(f"t must be a number, 'auto', or 'refined', got {t!r}")
        t_val = auto_t(family.dim, "standard" if t == "auto" else "refined")
    else:
        t_val = float(t)
        if not (0.0 < t_val < 1.0):
            raise ValueError("t must lie in (0, 1)")

    part = partition(family, eps, t_val, cfg, tol)
    wfam = build_w(part, family)
    wres = drift_order(wfam.w_vectors, tol) if part.groups else _trivial_w_order()

    blocks = [part.groups[i].indices for i in wres.ordering.perm]
    blocks.append(part.residual)
    perm = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)
    return ReduceResult(Ordering(perm.astype(np.int64), drift=False), part, wfam, wres)


def bound_value(d: int, eps: float, s_eps: float) -> float:
    """(1/eps) * (s_eps + 200 * sqrt(d / log d)); defined for d >= 2."""
    if int(d) != d or d < 2:
        raise ValueError("dimension must be an integer >= 2")
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    return (s_eps + 200.0 * math.sqrt(d / math.log(d))) / eps


@dataclass(frozen=True)
class GroupPartialReport:
    max_partial: float
    bound: float  # 1 / (eps * t)
    holds: bool
    per_group_max: tuple[float, ...]


def group_partial_check(part: PartitionResult, family: VectorFamily, eps: float, t: float) -> GroupPartialReport:
    """Check every realized within-group prefix against |sum| <= 1/(eps t).

    Groups are traversed in their internal (ascending index) order; the
    prefixes of that order are exactly the partial group sums the expanded
    ordering realizes.
    """
    bound = 1.0 / (eps * t)
    per_group = []
    for grp in part.groups:
        pref = tree_prefix_sums(family.vectors[grp.indices])
        per_group.append(float(np.max(np.sqrt(np.einsum("ij,ij->i", pref, pref)))))
    max_partial = max(per_group, default=0.0)
    return GroupPartialReport(max_partial, bound, max_partial <= bound + 1e-9, tuple(per_group))


def certify(
    family: VectorFamily,
    ordering: Ordering,
    part: PartitionResult,
    wres: OrderResult,
    eps: float,
    t: float,
) -> CertReport:
    """Certify every prefix of a pipeline ordering against the bound decomposition.

    Inputs must come from the same reduce_order run; the block structure is
    reconstructed and compared with the given permutation, the w drift
    constant is re-measured, and the block algebra (each prefix equals block
    sums plus a group partial, residual prefixes equal minus the uncovered
    residual sum) is re-verified before the bound comparison.
    """
    n, d = family.n, family.dim
    wfam = build_w(part, family)
    m = len(part.groups)
    if wres.ordering.n != m:
        raise ValueError("w ordering does not match the partition group count")

    blocks = [part.groups[i].indices for i in wres.ordering.perm]
    expect = np.concatenate(blocks + [part.residual]) if m or part.residual.size else np.zeros(0, dtype=np.int64)
    if ordering.n != n or not np.array_equal(ordering.perm, expect):
        raise ValueError("ordering does not match the partition / w-order reconstruction")

    cap = cap_measure(CapQuery(d, t))
    sigma = cap.sigma
    inv_t = 1.0 / t
    inv_sigma = 1.0 / sigma if sigma > 0.0 else math.inf

    w_perm = wres.ordering.perm
    c_w = prefix_report(wfam.w_vectors, Ordering(w_perm, drift=True)).max_norm if m else 0.0
    if abs(c_w - wres.achieved) > 1e-9 * max(1.0, c_w):
        raise ValueError("w order result does not match the supplied partition")

    report = prefix_report(family, Ordering(ordering.perm, drift=False))
    norms = report.per_prefix_norms
    zs = _l2(tree_sum(family.vectors))
    algebra_tol = 1e-9 + 2.0 * zs

    pref = tree_prefix_sums(family.vectors[ordering.perm])
    sizes = [len(b) for b in blocks]
    boundaries = np.cumsum([0] + sizes)
    covered = int(boundaries[-1])

    # Identity at the w level: block-boundary prefixes track the w prefix
    # sums shifted by the residual line, within the measured drift constant.
    if m:
        w_pref = tree_prefix_sums(wfam.w_vectors.vectors[w_perm])
        res_sum = tree_sum(family.vectors[part.residual])
        j_frac = (np.arange(1, m + 1) / m)[:, None]
        shifted = w_pref + eps * j_frac * res_sum
        if np.max(np.sqrt(np.einsum("ij,ij->i", shifted, shifted))) > c_w + 2e-9 + eps * zs:
            raise RuntimeError("w prefix identity violated beyond the measured drift constant")
        # Every covered prefix equals (sum of earlier blocks) + (partial of
        # the current block), recomputed independently of the main scan.
        expected = np.empty((covered, d))
        offset = np.zeros(d)
        pos = 0
        for b in blocks:
            expected[pos : pos + len(b)] = offset + tree_prefix_sums(family.vectors[b])
            offset = offset + tree_sum(family.vectors[b])
            pos += len(b)
        gap = pref[:covered] - expected
        if np.max(np.sqrt(np.einsum("ij,ij->i", gap, gap))) > algebra_tol:
            raise RuntimeError("covered prefix does not equal block sums plus group partial")
        gap_w = eps * expected[boundaries[1:] - 1] - w_pref
        if np.max(np.sqrt(np.einsum("ij,ij->i", gap_w, gap_w))) > algebra_tol:
            raise RuntimeError("block-boundary prefix does not equal the w prefix sum")

    # Residual-tail algebra: prefix = -(sum of residual not yet placed).
    if part.residual.size:
        res_scan = tree_prefix_sums(family.vectors[part.residual])
        gap = pref[covered:] - (res_scan - res_scan[-1])
        if np.max(np.sqrt(np.einsum("ij,ij->i", gap, gap))) > algebra_tol:
            raise RuntimeError("residual-tail prefix algebra violated")

    type_a_mask = np.arange(1, n + 1) < covered
    type_b_mask = ~type_a_mask
    type_a_max = float(np.max(norms[type_a_mask])) if np.any(type_a_mask) else 0.0
    type_b_max = float(np.max(norms[type_b_mask])) if np.any(type_b_mask) else 0.0

    gp = group_partial_check(part, family, eps, t)
    bound = (c_w + inv_t + inv_sigma) / eps
    type_a_bound = inv_sigma / eps + c_w / eps + gp.max_partial
    type_b_bound = inv_sigma / eps

    steinitz_bound = bound_value(d, eps, c_w)
    return CertReport(
        prefix_max=report.max_norm,
        c_w=c_w,
        inv_t=inv_t,
        inv_sigma_t=inv_sigma,
        bound=bound,
        type_a_max=type_a_max,
        type_b_max=type_b_max,
        passed=report.max_norm <= bound + 1e-6,
        type_a_bound=type_a_bound,
        type_a_ok=type_a_max <= type_a_bound + 1e-6,
        type_b_bound=type_b_bound,
        type_b_ok=type_b_max <= type_b_bound + 1e-6,
        max_group_partial=gp.max_partial,
        steinitz_bound=steinitz_bound,
        steinitz_dominates=steinitz_bound >= bound - 1e-9,
        sigma=sigma,
        sigma_error=cap.abs_error_estimate,
        eps=float(eps),
        t=float(t),
        d=d,
        n=n,
        n_groups=m,
        residual_size=int(part.residual.size),
    )
