"""Deterministic, seedable instance generators.

Every generator is a pure function of its arguments; randomness comes only
from the Philox counter-based PRNG keyed by the caller's seed, so corpora
are bit-reproducible across runs and platforms.

The l1 family is an adversarial-search experiment, not a certified extremal
construction: it reports whatever the exact oracle measures rather than
asserting a literature lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Gauge, VectorFamily, philox_generator, row_norms, tree_sum

RADIAL_SPHERE = "sphere"
RADIAL_BALL = "ball"

GEN_KINDS = ("simplex", "random_zero_sum", "l1_adversarial", "hadamard", "near_unit", "two_dir")


def _helmert_basis(d: int) -> np.ndarray:
    """Orthonormal (d, d+1) basis of the hyperplane orthogonal to all-ones."""
    h = np.zeros((d, d + 1))
    for k in range(1, d + 1):
        h[k - 1, :k] = 1.0
        h[k - 1, k] = -float(k)
        h[k - 1] /= np.sqrt(k * (k + 1.0))
    return h


def gen_simplex(d: int) -> VectorFamily:
    """Vertices of the regular simplex centered at the origin: d+1 unit
    vectors with pairwise inner product -1/d, summing to zero."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    h = _helmert_basis(d)
    verts = np.sqrt((d + 1.0) / d) * h.T  # rows are the d+1 vertices
    return VectorFamily(verts, Gauge.euclidean())


def gen_random_zero_sum(
    d: int,
    n: int,
    seed: int,
    radial_mode: str = RADIAL_SPHERE,
    gauge: Gauge | None = None,
) -> VectorFamily:
    """Random zero-sum family rescaled so the max gauge norm is exactly 1.

    Directions are normalized Gaussians; radii are 1 (sphere mode) or
    uniform^(1/d) (ball mode). The mean is subtracted before rescaling. A
    degenerate draw (all vectors equal after centering) retries with a
    derived sub-key.
    """
    if n < 2:
        raise ValueError("need n >= 2 for a zero-sum family")
    if radial_mode not in (RADIAL_SPHERE, RADIAL_BALL):
        raise ValueError(f"unknown radial mode {radial_mode!r}")
    gauge = gauge or Gauge.euclidean()
    for attempt in range(16):
        rng = philox_generator((int(seed) & (2**64 - 1)) + (attempt << 64))
        g = rng.standard_normal((n, d))
        norms = np.sqrt(np.einsum("ij,ij->i", g, g))
        if np.any(norms == 0.0):
            continue
        v = g / norms[:, None]
        if radial_mode == RADIAL_BALL:
            v = v * (rng.random(n) ** (1.0 / d))[:, None]
        v = v - tree_sum(v) / n
        mx = float(np.max(row_norms(v, gauge)))
        if mx <= 1e-12:
            continue
        return VectorFamily(v / mx, gauge)
    raise RuntimeError("generator kept drawing degenerate families")


def gen_l1_adversarial(d: int) -> VectorFamily:
    """Zero-sum family of l1-unit vectors from signed basis patterns.

    The family is {e_1, ..., e_d} plus d copies of -(1/d) * ones. Whether
    sign-pattern families of this shape reach the conjectured l1 extremal
    growth is left to measurement; pair with the exact oracle for n <= 20.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rows = np.vstack([np.eye(d), np.tile(-np.ones(d) / d, (d, 1))])
    return VectorFamily(rows, Gauge.lp(1.0))


def gen_hadamard(d: int) -> VectorFamily:
    """Sylvester-Hadamard rows (entries +-1, max-norm 1) plus their negations.

    Requires d a power of two. Orthogonality (Gram = d * I) is exact in the
    integer construction before casting to float.
    """
    if d < 1 or d & (d - 1):
        raise ValueError("Hadamard generator requires d a power of 2")
    h = np.ones((1, 1), dtype=np.int64)
    while h.shape[0] < d:
        h = np.block([[h, h], [h, -h]])
    rows = np.vstack([h, -h]).astype(np.float64)
    return VectorFamily(rows, Gauge.linf())


def gen_near_unit(d: int, n: int, eps: float, seed: int) -> VectorFamily:
    """n vectors with Euclidean norms uniform in [1-eps, 1], directions uniform."""
    if n < 1:
        raise ValueError("need n >= 1")
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    rng = philox_generator(seed)
    g = rng.standard_normal((n, d))
    norms = np.sqrt(np.einsum("ij,ij->i", g, g))
    norms[norms == 0.0] = 1.0
    radii = rng.uniform(1.0 - eps, 1.0, n)
    return VectorFamily(g / norms[:, None] * radii[:, None], Gauge.euclidean())


def gen_two_dir(d: int, m: int) -> VectorFamily:
    """m copies of e_1 and m copies of -e_1; the canonical partition smoke test."""
    if m < 1:
        raise ValueError("need m >= 1")
    rows = np.zeros((2 * m, d))
    rows[:m, 0] = 1.0
    rows[m:, 0] = -1.0
    return VectorFamily(rows, Gauge.euclidean())


@dataclass(frozen=True)
class GenSpec:
    """Declarative generator request, used by the CLI and the bench harness."""

    kind: str
    d: int
    n: int = 0
    eps: float = 0.0
    seed: int = 0
    radial_mode: str = RADIAL_SPHERE
    gauge_p: float = 2.0

    def __post_init__(self):
        if self.kind not in GEN_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "hadamard" and (self.d < 1 or self.d & (self.d - 1)):
            raise ValueError("hadamard requires d a power of 2")
        if self.kind == "near_unit" and not (0.0 < self.eps <= 1.0):
            raise ValueError("near_unit requires eps in (0, 1]")
        if self.kind == "two_dir" and (self.n < 2 or self.n % 2):
            raise ValueError("two_dir requires even n >= 2")
        if self.kind == "random_zero_sum" and self.n < 2:
            raise ValueError("random_zero_sum requires n >= 2")


def generate(spec: GenSpec) -> VectorFamily:
    if spec.kind == "simplex":
        return gen_simplex(spec.d)
    if spec.kind == "random_zero_sum":
        return gen_random_zero_sum(spec.d, spec.n, spec.seed, spec.radial_mode, Gauge(spec.gauge_p))
    if spec.kind == "l1_adversarial":
        return gen_l1_adversarial(spec.d)
    if spec.kind == "hadamard":
        return gen_hadamard(spec.d)
    if spec.kind == "near_unit":
        return gen_near_unit(spec.d, spec.n, spec.eps, spec.seed)
    if spec.kind == "two_dir":
        return gen_two_dir(spec.d, spec.n // 2)
    raise ValueError(f"unknown generator kind {spec.kind!r}")
