"""Ball-cone partition machinery.

A ball-cone K_t(u) of height t in direction u is the set of vectors in the
Euclidean unit ball whose direction makes cosine at least t with u. The
partition peels groups off a zero-sum family: as long as some cone slice of
the residual has sum norm at least 1/eps - 1, a containment-minimal subset
of that slice becomes a group, recorded with its witness direction. Each
group therefore satisfies

  (i)  every member lies in K_t(u_alpha),
  (ii) 1/eps - 1 <= |sum(group)| <= 1/eps,

and when the loop stops no sampled cone slice of the residual qualifies.
The existential search over all directions and subsets is not exactly
computable; the search here is a documented deterministic heuristic (data
directions, a low-discrepancy direction set, fixed-point ascent, and a
small-subset enumeration fallback), and how the residual was checked is
recorded rather than assumed.

All geometry in this module is Euclidean regardless of the family's gauge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import erfinv

from .core import DEFAULT_TOL, VectorFamily, philox_generator, tree_sum
from .kernels import subset_sums

#: Cosine comparisons treat the closed cone boundary as inside.
COS_BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class BallCone:
    """A ball-cone: unit direction u and height t in (0, 1)."""

    u: np.ndarray
    t: float

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64, copy=True)
        if u.ndim != 1:
            raise ValueError("cone direction must be a vector")
        if abs(float(u @ u) - 1.0) > 3e-12:
            raise ValueError("cone direction must be a unit vector")
        if not (0.0 < self.t < 1.0):
            raise ValueError("cone height must lie in (0, 1)")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class WitnessSearchConfig:
    random_directions: int = 128
    ascent_iterations: int = 4
    subset_bruteforce_cap: int = 12
    seed: int = 0

    def __post_init__(self):
        if min(self.random_directions, self.ascent_iterations, self.subset_bruteforce_cap) < 0:
            raise ValueError("search configuration counts must be nonnegative")


@dataclass(frozen=True)
class ResidualCertificate:
    kind: str  # "exact", "sampled", or "none"
    directions: int = 0


@dataclass(frozen=True)
class Group:
    indices: np.ndarray  # sorted family indices
    witness: np.ndarray  # unit direction

    def __post_init__(self):
        idx = np.array(self.indices, dtype=np.int64, copy=True)
        w = np.array(self.witness, dtype=np.float64, copy=True)
        idx.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "witness", w)


@dataclass(frozen=True)
class PartitionResult:
    groups: tuple[Group, ...]
    residual: np.ndarray
    eps: float
    t: float
    residual_certificate: ResidualCertificate

    def with_certificate(self, cert: ResidualCertificate) -> "PartitionResult":
        return replace(self, residual_certificate=cert)


def _l2_norms(rows: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("ij,ij->i", rows, rows))


def cone_contains(v, cone: BallCone) -> bool:
    """Whether v lies in the ball-cone. The zero vector never does."""
    v = np.asarray(v, dtype=np.float64)
    nv = float(np.sqrt(v @ v))
    if nv == 0.0:
        return False
    return float(v @ cone.u) / nv >= cone.t - COS_BOUNDARY_TOL


def _first_primes(count: int) -> list[int]:
    primes: list[int] = []
    x = 2
    while len(primes) < count:
        if all(x % p for p in primes):
            primes.append(x)
        x += 1
    return primes


@lru_cache(maxsize=64)
def _quasi_uniform_cached(count: int, dim: int, seed: int) -> np.ndarray:
    alpha = np.sqrt(np.array(_first_primes(dim), dtype=np.float64)) % 1.0
    shift = philox_generator(seed).random(dim)
    k = np.arange(1, count + 1, dtype=np.float64)
    z = (np.outer(k, alpha) + shift) % 1.0
    z = np.clip(z, 1e-12, 1.0 - 1e-12)
    g = math.sqrt(2.0) * erfinv(2.0 * z - 1.0)
    norms = _l2_norms(g)
    bad = norms <= 0.0
    if np.any(bad):
        g[bad] = 0.0
        g[bad, 0] = 1.0
        norms = _l2_norms(g)
    dirs = np.vstack([g / norms[:, None], -g / norms[:, None]])
    dirs.setflags(write=False)
    return dirs


def quasi_uniform_directions(count: int, dim: int, seed: int) -> np.ndarray:
    """Deterministic low-discrepancy unit directions plus their antipodes.

    A Kronecker lattice (square-root-of-prime increments with a seeded
    shift) mapped through the Gaussian inverse CDF and normalized; returns
    2 * count rows.
    """
    if count == 0:
        return np.zeros((0, dim))
    return _quasi_uniform_cached(int(count), int(dim), int(seed))


def _cone_stats(vecs: np.ndarray, units: np.ndarray, dirs: np.ndarray, t: float):
    """Membership masks, cone-slice sums, and their norms for many directions."""
    member = units @ dirs.T >= t - COS_BOUNDARY_TOL  # (m, D)
    sums = vecs.T @ member  # (d, D)
    norms = np.sqrt(np.einsum("ij,ij->j", sums, sums))
    return member, sums.T, norms


def witness_search(
    family: VectorFamily,
    active,
    eps: float,
    t: float,
    cfg: WitnessSearchConfig | None = None,
) -> tuple[BallCone, np.ndarray] | None:
    """Search for a cone whose slice of the active set has sum norm >= 1/eps - 1.

    Candidate directions, in deterministic order: the active members' own
    directions, the low-discrepancy set, then fixed-point ascent
    u <- normalize(sum(active within the cone at u)) from every candidate.
    A direction whose full cone slice does not qualify falls back to the
    best-norm subset of the slice by enumeration when the slice is small
    enough. Returns the qualifying candidate of largest sum norm, or None.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if not (0.0 < t < 1.0):
        raise ValueError("t must lie in (0, 1)")
    cfg = cfg or WitnessSearchConfig()
    active = np.asarray(sorted(active), dtype=np.int64)
    threshold = 1.0 / eps - 1.0

    vecs = family.vectors[active]
    l2 = _l2_norms(vecs)
    nz = l2 > 0.0
    if not np.any(nz):
        return None
    act_idx = active[nz]
    avecs = vecs[nz]
    units = avecs / l2[nz][:, None]

    dirs = units
    if cfg.random_directions:
        dirs = np.vstack([units, quasi_uniform_directions(cfg.random_directions, family.dim, cfg.seed)])

    def best_qualifying(dir_mat, member, norms):
        qual = norms >= threshold - 1e-9
        if not np.any(qual):
            return None
        j = int(np.argmax(np.where(qual, norms, -np.inf)))
        return BallCone(dir_mat[j], t), act_idx[member[:, j]]

    member, sums, norms = _cone_stats(avecs, units, dirs, t)
    found = best_qualifying(dirs, member, norms)
    if found is not None:
        return found

    # Fixed-point ascent from every candidate direction.
    cur = dirs
    alive = np.ones(cur.shape[0], dtype=bool)
    best: tuple[float, np.ndarray, np.ndarray] | None = None
    for _ in range(cfg.ascent_iterations):
        alive &= norms > 0.0
        if not np.any(alive):
            break
        nxt = cur.copy()
        nxt[alive] = sums[alive] / norms[alive][:, None]
        cur = nxt
        member, sums, norms = _cone_stats(avecs, units, cur, t)
        qual = np.nonzero((norms >= threshold - 1e-9) & alive)[0]
        for j in qual:
            if best is None or norms[j] > best[0]:
                best = (float(norms[j]), cur[j], member[:, j])
    if best is not None:
        return BallCone(best[1], t), act_idx[best[2]]

    # Enumeration fallback on small cone slices, deduplicated by membership.
    all_dirs = np.vstack([dirs, cur])
    member, _, _ = _cone_stats(avecs, units, all_dirs, t)
    seen: set[bytes] = set()
    for j in range(all_dirs.shape[0]):
        mask = member[:, j]
        pop = int(np.sum(mask))
        if pop < 1 or pop > cfg.subset_bruteforce_cap:
            continue
        key = mask.tobytes()
        if key in seen:
            continue
        seen.add(key)
        local = np.nonzero(mask)[0]
        tnorms = _l2_norms(subset_sums(avecs[local]))
        s = int(np.argmax(tnorms))
        if tnorms[s] >= threshold - 1e-9 and (best is None or tnorms[s] > best[0]):
            submask = np.zeros_like(mask)
            submask[local[[i for i in range(pop) if s >> i & 1]]] = True
            best = (float(tnorms[s]), all_dirs[j], submask)
    if best is not None:
        return BallCone(best[1], t), act_idx[best[2]]
    return None


def trim_minimal(family: VectorFamily, candidate, threshold: float) -> np.ndarray:
    """Shrink a candidate set to containment-minimality above a sum threshold.

    Repeated ascending-index passes remove any element whose removal keeps
    the Euclidean sum norm at or above the threshold; on return, removing
    any single element drops below it. With member norms at most 1 this
    pins |sum| into [threshold, threshold + 1).
    """
    idx = np.asarray(sorted(candidate), dtype=np.int64)
    vecs = family.vectors[idx]
    kept = np.ones(idx.size, dtype=bool)
    s = tree_sum(vecs)
    if float(np.sqrt(s @ s)) < threshold - 1e-9:
        raise ValueError("candidate sum is below the trim threshold")
    changed = True
    while changed:
        changed = False
        s = tree_sum(vecs[kept])
        for pos in range(idx.size):
            if not kept[pos]:
                continue
            trial = s - vecs[pos]
            if float(np.sqrt(trial @ trial)) >= threshold:
                kept[pos] = False
                s = trial
                changed = True
    return idx[kept]


def partition(
    family: VectorFamily,
    eps: float,
    t: float,
    cfg: WitnessSearchConfig | None = None,
    tol: float = DEFAULT_TOL,
) -> PartitionResult:
    """Greedy cone partition of a zero-sum family in the unit ball.

    Loops witness_search / trim_minimal until no cone qualifies. Properties
    (i) and (ii) are re-checked on every recorded group; zero vectors always
    stay in the residual. The residual certificate starts as "none"; run
    :func:`verify_residual` to upgrade it.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if not (0.0 < t < 1.0):
        raise ValueError("t must lie in (0, 1)")
    cfg = cfg or WitnessSearchConfig()
    l2 = _l2_norms(family.vectors)
    if np.any(l2 > 1.0 + 1e-9):
        raise ValueError("partition requires Euclidean norms <= 1")
    total = tree_sum(family.vectors)
    if float(np.sqrt(total @ total)) > tol * max(1.0, family.n):
        raise ValueError("partition requires a zero-sum family")

    threshold = 1.0 / eps - 1.0
    residual = np.arange(family.n, dtype=np.int64)
    groups: list[Group] = []
    while residual.size:
        found = witness_search(family, residual, eps, t, cfg)
        if found is None:
            break
        cone, cand = found
        member_idx = trim_minimal(family, cand, threshold)
        gvecs = family.vectors[member_idx]
        gl2 = _l2_norms(gvecs)
        cosines = (gvecs @ cone.u) / gl2
        if np.any(cosines < t - 1e-9):
            raise RuntimeError("partition: group member fell outside its witness cone")
        gs = tree_sum(gvecs)
        gnorm = float(np.sqrt(gs @ gs))
        if not (threshold - 1e-9 <= gnorm <= 1.0 / eps + 1e-9):
            raise RuntimeError(f"partition: group sum norm {gnorm:.6f} outside [1/eps-1, 1/eps]")
        groups.append(Group(member_idx, cone.u))
        residual = np.setdiff1d(residual, member_idx, assume_unique=True)
    return PartitionResult(tuple(groups), residual, float(eps), float(t), ResidualCertificate("none"))


def max_min_cosine(units: np.ndarray, seed: int = 0) -> tuple[float, np.ndarray]:
    """max over unit u of min_i <units_i, u>.

    d = 2 is solved exactly (the optimum is attained at a data direction or
    at an angular midpoint of a pair). Higher d uses projected subgradient
    ascent from the normalized mean with seeded restarts, then polishes with
    the equi-cosine active-set solve.
    """
    k, d = units.shape
    if k == 0:
        raise ValueError("need at least one direction")
    if d == 2:
        ang = np.arctan2(units[:, 1], units[:, 0])
        cands = [ang]
        diff = (ang[None, :] - ang[:, None]) / 2.0
        mids = ang[:, None] + diff
        cands.append(mids.ravel())
        cands.append(mids.ravel() + math.pi)
        theta = np.concatenate(cands)
        u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        vals = np.min(u @ units.T, axis=1)
        j = int(np.argmax(vals))
        return float(vals[j]), u[j]

    mean = units.mean(axis=0)
    nm = float(np.sqrt(mean @ mean))
    base = mean / nm if nm > 0 else np.eye(d)[0]
    rng = philox_generator(seed)
    restarts = 50
    starts = base[None, :] + 0.3 * rng.standard_normal((restarts, d))
    starts[0] = base
    starts /= _l2_norms(starts)[:, None]

    u = starts
    for it in range(150):
        cos = u @ units.T
        worst = np.argmin(cos, axis=1)
        grad = units[worst]
        step = 0.4 / math.sqrt(1.0 + it)
        u = u + step * grad
        u /= _l2_norms(u)[:, None]

    vals = np.min(u @ units.T, axis=1)
    j = int(np.argmax(vals))
    best_val, best_u = float(vals[j]), u[j]

    def equi_cosine_candidate(rows):
        # direction making equal cosine with every row: solve rows z = 1
        z, *_ = np.linalg.lstsq(rows, np.ones(rows.shape[0]), rcond=None)
        nz_ = float(np.sqrt(z @ z))
        return z / nz_ if nz_ > 0.0 else None

    def polish(uj):
        # ascend through equi-cosine solves on the s lowest-cosine supports
        vj = float(np.min(uj @ units.T))
        for _ in range(8):
            order = np.argsort(uj @ units.T, kind="stable")
            improved = False
            for s in range(2, min(k, d + 1) + 1):
                cand = equi_cosine_candidate(units[order[:s]])
                if cand is None:
                    continue
                vc = float(np.min(cand @ units.T))
                if vc > vj + 1e-15:
                    uj, vj = cand, vc
                    improved = True
                    break
            if not improved:
                break
        return vj, uj

    best_val, best_u = polish(best_u)
    if k <= 14:
        # small instances: enumerate every candidate support exactly
        from itertools import combinations

        for s in range(2, min(k, d + 1) + 1):
            for sub in combinations(range(k), s):
                cand = equi_cosine_candidate(units[list(sub)])
                if cand is None:
                    continue
                vc = float(np.min(cand @ units.T))
                if vc > best_val:
                    best_val, best_u = vc, cand
    return best_val, best_u


@dataclass(frozen=True)
class ResidualReport:
    mode: str
    holds: bool
    threshold: float  # 1/eps
    worst_value: float
    violations: tuple[dict, ...]
    directions_checked: int
    subsets_checked: int
    certificate: ResidualCertificate


def verify_residual(
    family: VectorFamily,
    residual,
    eps: float,
    t: float,
    mode: str = "sampled",
    cfg: WitnessSearchConfig | None = None,
) -> ResidualReport:
    """Check that no cone slice of the residual reaches sum norm 1/eps.

    exact   : enumerate every subset with sum norm >= 1/eps and decide
              whether its members fit a common cone (max-min cosine >= t);
              requires at most 12 nonzero members and d <= 4.
    sampled : evaluate full cone slices over the configured direction set
              plus all data directions.

    Violations are returned, not raised; a violation means the witness
    search missed a cone, which only costs partition quality.
    """
    cfg = cfg or WitnessSearchConfig()
    residual = np.asarray(sorted(residual), dtype=np.int64)
    threshold = 1.0 / eps
    vecs = family.vectors[residual]
    l2 = _l2_norms(vecs)
    nz = l2 > 0.0
    nz_idx = residual[nz]
    nz_vecs = vecs[nz]
    units = nz_vecs / l2[nz][:, None]

    if mode == "exact":
        if nz_idx.size > 12:
            raise ValueError("exact residual verification is capped at 12 nonzero members")
        if family.dim > 4:
            raise ValueError("exact residual verification is capped at d <= 4")
        violations = []
        worst = 0.0
        checked = 0
        if nz_idx.size:
            table = subset_sums(nz_vecs)
            tnorms = _l2_norms(table)
            for mask in np.nonzero(tnorms >= threshold - 1e-9)[0]:
                if mask == 0:
                    continue
                checked += 1
                members = [i for i in range(nz_idx.size) if mask >> i & 1]
                val, _ = max_min_cosine(units[members], seed=cfg.seed)
                if val >= t - 1e-9:
                    violations.append(
                        {
                            "indices": [int(nz_idx[i]) for i in members],
                            "sum_norm": float(tnorms[mask]),
                            "max_min_cosine": float(val),
                        }
                    )
                    worst = max(worst, float(tnorms[mask]))
        holds = not violations
        return ResidualReport(
            "exact", holds, threshold, worst, tuple(violations), 0, checked, ResidualCertificate("exact")
        )

    if mode != "sampled":
        raise ValueError(f"unknown residual verification mode {mode!r}")
    dirs = units
    if cfg.random_directions:
        dirs = np.vstack([units, quasi_uniform_directions(cfg.random_directions, family.dim, cfg.seed)])
    worst = 0.0
    violations = []
    if nz_idx.size and dirs.shape[0]:
        _, _, norms = _cone_stats(nz_vecs, units, dirs, t)
        worst = float(np.max(norms)) if norms.size else 0.0
        for j in np.nonzero(norms >= threshold)[0]:
            violations.append({"direction_index": int(j), "sum_norm": float(norms[j])})
    holds = worst < threshold
    return ResidualReport(
        "sampled",
        holds,
        threshold,
        worst,
        tuple(violations),
        int(dirs.shape[0]) if nz_idx.size else 0,
        0,
        ResidualCertificate("sampled", cfg.random_directions),
    )
