"""Vector families, lp gauges, orderings, and prefix-sum evaluation.

This is the shared substrate for everything else: a family is an (n, d)
float64 matrix together with the gauge (norm) its vectors are measured in.
Two evaluation modes exist for an ordering:

  plain  : the k-th value is ||v_1 + ... + v_k||
  drift  : the k-th value is ||v_1 + ... + v_k - (k/n) * total||

Drift mode subtracts the straight-line interpolation of the total, so the
last value vanishes for any family, zero-sum or not.

All accumulation is pairwise (balanced binary tree), which is deterministic
and keeps rounding growth logarithmic in n instead of linear; families up to
n ~ 1e5 stay well inside the 1e-9 comparison tolerances used downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Default tolerance for comparisons against analytic thresholds. The
#: inequalities being certified have large slack; 1e-9 separates a genuine
#: violation from accumulated rounding.
DEFAULT_TOL = 1e-9


def philox_generator(seed: int) -> np.random.Generator:
    """Seeded counter-based PRNG (Philox 4x64) used for every random draw.

    Philox is a published, portable algorithm, so streams can be reproduced
    bit-for-bit outside this package.
    """
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**128 - 1)))


@dataclass(frozen=True)
class Gauge:
    """An lp gauge on R^d.

    ``p`` may be any real in [1, inf]. ``math.inf`` is an explicit case with
    its own max-abs branch, never a large finite exponent, so no power
    computation can overflow. ``Gauge.euclidean()`` is literally ``Gauge(2.0)``
    which makes Euclidean and lp(2) norms bit-identical by construction.
    """

    p: float = 2.0

    def __post_init__(self):
        p = float(self.p)
        if not (p >= 1.0):  # rejects NaN as well
            raise ValueError(f"gauge exponent must satisfy p >= 1, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @classmethod
    def euclidean(cls) -> "Gauge":
        return cls(2.0)

    @classmethod
    def lp(cls, p: float) -> "Gauge":
        return cls(float(p))

    @classmethod
    def linf(cls) -> "Gauge":
        return cls(math.inf)

    @property
    def label(self) -> str:
        return "inf" if math.isinf(self.p) else repr(self.p)


def as_vector(coords, dim: int | None = None) -> np.ndarray:
    """Validate and return a finite 1-D float64 vector."""
    v = np.asarray(coords, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] == 0:
        raise ValueError(f"expected a nonempty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has NaN or Inf entries")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: vector has {v.shape[0]}, expected {dim}")
    return v


def row_norms(rows: np.ndarray, gauge: Gauge) -> np.ndarray:
    """Gauge norms of each row of a 2-D array."""
    rows = np.asarray(rows, dtype=np.float64)
    p = gauge.p
    if p == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", rows, rows))
    a = np.abs(rows)
    if p == 1.0:
        return np.sum(a, axis=1)
    if math.isinf(p):
        return np.max(a, axis=1) if rows.shape[1] else np.zeros(rows.shape[0])
    # General p: factor out the max to keep the powers in range.
    m = np.max(a, axis=1)
    out = np.zeros_like(m)
    nz = m > 0.0
    if np.any(nz):
        scaled = a[nz] / m[nz, None]
        out[nz] = m[nz] * np.power(np.sum(np.power(scaled, p), axis=1), 1.0 / p)
    return out


def gauge_norm(v, gauge: Gauge) -> float:
    """Gauge norm of a single vector.

    Nonnegative, zero exactly on the zero vector, positively homogeneous.
    """
    v = as_vector(v)
    return float(row_norms(v[None, :], gauge)[0])


def tree_sum(rows: np.ndarray) -> np.ndarray:
    """Sum along axis 0 by pairwise (balanced tree) reduction.

    Deterministic, O(log n) rounding depth. Empty input sums to zeros.
    """
    buf = np.array(rows, dtype=np.float64, copy=True)
    n = buf.shape[0]
    if n == 0:
        return np.zeros(buf.shape[1:], dtype=np.float64)
    while n > 1:
        half = n // 2
        buf[:half] = buf[0 : 2 * half : 2] + buf[1 : 2 * half : 2]
        if n % 2:
            buf[half] = buf[n - 1]
            n = half + 1
        else:
            n = half
    return buf[0].copy()


def tree_prefix_sums(rows: np.ndarray) -> np.ndarray:
    """Inclusive prefix sums along axis 0 via a work-efficient tree scan.

    Equivalent to ``np.cumsum(rows, axis=0)`` up to rounding, but the
    accumulation tree has depth O(log n).
    """
    rows = np.asarray(rows, dtype=np.float64)
    n = rows.shape[0]
    if n == 0:
        return rows.copy()
    p = 1 << (n - 1).bit_length()
    buf = np.zeros((p,) + rows.shape[1:], dtype=np.float64)
    buf[:n] = rows
    step = 1
    while step < p:  # up-sweep
        buf[2 * step - 1 :: 2 * step] += buf[step - 1 :: 2 * step]
        step *= 2
    buf[-1] = 0.0
    step = p // 2
    while step >= 1:  # down-sweep, leaves an exclusive scan in buf
        upper = buf[2 * step - 1 :: 2 * step]
        lower = buf[step - 1 :: 2 * step].copy()
        buf[step - 1 :: 2 * step] = upper
        upper += lower
        step //= 2
    return buf[:n] + rows


@dataclass(frozen=True)
class VectorFamily:
    """An indexed list of d-dimensional vectors plus the gauge they live in.

    Immutable after construction; the coordinate matrix is marked read-only.
    Indices are 0..n-1 in row order.
    """

    vectors: np.ndarray
    gauge: Gauge = Gauge(2.0)

    def __post_init__(self):
        m = np.array(self.vectors, dtype=np.float64, copy=True)
        if m.ndim != 2:
            raise ValueError(f"expected an (n, d) matrix, got shape {m.shape}")
        if m.shape[1] < 1:
            raise ValueError("dimension must be positive")
        if not np.all(np.isfinite(m)):
            raise ValueError("family has NaN or Inf entries")
        m.setflags(write=False)
        object.__setattr__(self, "vectors", m)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def norms(self) -> np.ndarray:
        return row_norms(self.vectors, self.gauge)

    def max_norm(self) -> float:
        return float(np.max(self.norms())) if self.n else 0.0

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class Ordering:
    """A permutation of family indices plus the evaluation mode."""

    perm: np.ndarray
    drift: bool = False

    def __post_init__(self):
        p = np.array(self.perm, dtype=np.int64, copy=True)
        if p.ndim != 1:
            raise ValueError("permutation must be 1-D")
        n = p.shape[0]
        seen = np.zeros(n, dtype=bool)
        if n and (p.min() < 0 or p.max() >= n):
            raise ValueError("permutation entries out of range")
        seen[p] = True
        if not np.all(seen):
            raise ValueError("permutation is not a bijection on 0..n-1")
        p.setflags(write=False)
        object.__setattr__(self, "perm", p)
        object.__setattr__(self, "drift", bool(self.drift))

    @property
    def n(self) -> int:
        return self.perm.shape[0]


@dataclass(frozen=True)
class PrefixReport:
    """Per-prefix gauge norms of an evaluated ordering."""

    max_norm: float
    argmax_k: int  # 1-based index of the first maximal prefix, 0 if empty
    per_prefix_norms: np.ndarray
    drift: bool


def family_sum(family: VectorFamily) -> np.ndarray:
    """Componentwise sum of the family, accumulated pairwise in index order."""
    if family.n == 0:
        raise ValueError("cannot sum an empty family")
    return tree_sum(family.vectors)


def prefix_report(family: VectorFamily, ordering: Ordering) -> PrefixReport:
    """Evaluate an ordering: prefix sums, then gauge norms.

    In drift mode the correction uses the scan's own final row as the family
    total, so the last adjusted prefix is exactly zero.
    """
    n = family.n
    if ordering.n != n:
        raise ValueError(f"permutation length {ordering.n} does not match family size {n}")
    if n == 0:
        return PrefixReport(0.0, 0, np.zeros(0), ordering.drift)
    pref = tree_prefix_sums(family.vectors[ordering.perm])
    if ordering.drift:
        frac = np.arange(1, n + 1, dtype=np.float64) / n
        pref = pref - frac[:, None] * pref[-1]
    norms = row_norms(pref, family.gauge)
    k = int(np.argmax(norms))
    return PrefixReport(float(norms[k]), k + 1, norms, ordering.drift)


def center_family(family: VectorFamily) -> VectorFamily:
    """Subtract the mean vector from every member.

    The result sums to (numerical) zero and each norm at most doubles.
    Idempotent up to rounding.
    """
    if family.n == 0:
        raise ValueError("cannot center an empty family")
    mean = family_sum(family) / family.n
    return VectorFamily(family.vectors - mean, family.gauge)
