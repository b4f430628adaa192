import itertools
import math

import numpy as np
import pytest

from conftest import brute_force_min_max, ref_max_prefix
from steinitz import (
    Gauge,
    VectorFamily,
    WeightState,
    drift_order,
    gen_hadamard,
    gen_near_unit,
    gen_random_zero_sum,
    gen_simplex,
    gen_two_dir,
    greedy_order,
    gs_order,
    oracle_order,
    philox_generator,
    prefix_report,
    vertexify,
)

GAUGES = [Gauge(1.0), Gauge(2.0), Gauge.linf()]


def test_gs_antipodal_pair():
    fam = VectorFamily([[0.6, 0.0], [-0.6, 0.0]])
    res = gs_order(fam)
    assert res.achieved == pytest.approx(0.6, abs=1e-12)
    assert res.guarantee == 2.0


def test_simplex_d2_all_orderings_give_one():
    # every ordering of the three 120-degree unit vectors has prefix norms
    # {1, 1, 0}; brute force confirms the optimum is exactly 1
    fam = gen_simplex(2)
    for perm in itertools.permutations(range(3)):
        assert ref_max_prefix(fam.vectors, perm, 2.0) == pytest.approx(1.0, abs=1e-12)
    assert brute_force_min_max(fam.vectors, 2.0)[0] == pytest.approx(1.0, abs=1e-12)
    assert gs_order(fam).achieved == pytest.approx(1.0, abs=1e-9)
    assert oracle_order(fam).achieved == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("gauge", GAUGES)
def test_gs_respects_dimension_bound(gauge):
    for seed in range(10):
        d = 2 + seed % 3
        n = 6 + seed
        fam = gen_random_zero_sum(d, n, seed=seed, gauge=gauge)
        res = gs_order(fam)
        assert res.achieved <= d + 1e-9
        assert res.achieved == prefix_report(fam, res.ordering).max_norm


def test_gs_small_family_shortcut():
    # n <= d: ordering is the identity and prefixes stay under n <= d
    base = philox_generator(4).standard_normal((2, 5)) * 0.4
    rows = np.vstack([base, -base.sum(axis=0, keepdims=True)])
    rows /= max(1.0, np.max(np.sqrt((rows**2).sum(axis=1))))
    fam = VectorFamily(rows)
    res = gs_order(fam)
    assert np.array_equal(res.ordering.perm, [0, 1, 2])
    assert res.achieved <= 3 + 1e-9


def test_gs_input_validation():
    with pytest.raises(ValueError):
        gs_order(VectorFamily([[1.0, 0.0], [0.5, 0.0]]))  # not zero-sum
    with pytest.raises(ValueError):
        gs_order(VectorFamily([[2.0, 0.0], [-2.0, 0.0]]))  # norms > 1
    with pytest.raises(ValueError):
        gs_order(VectorFamily(np.zeros((0, 2))))


def test_gs_scale_equivariance_dyadic():
    fam = gen_random_zero_sum(3, 14, seed=21)
    res = gs_order(fam)
    for s in (0.5, 0.25):
        scaled = VectorFamily(fam.vectors * s, fam.gauge)
        res_s = gs_order(scaled)
        assert np.array_equal(res_s.ordering.perm, res.ordering.perm)
        assert res_s.achieved == s * res.achieved


def test_vertexify_fixed_point_returned_unchanged():
    # weighted sum must be zero for feasibility: build a compatible family
    v = np.zeros((10, 3))
    v[1] = [0.4, 0.0, 0.0]
    v[2] = [-0.3, 0.2, 0.0]
    v[3] = -2.0 * v[1] - v[2]
    fam = VectorFamily(v)
    state = WeightState(np.arange(4), np.array([0.0, 1.0, 0.5, 0.5]))
    out = vertexify(state, fam, 2.0)
    assert out is state  # already at most d+1 fractional weights


def test_vertexify_reduces_fractional_support():
    for seed in (0, 1, 2):
        d, k = 3, 12
        fam = gen_random_zero_sum(d, k, seed=seed)
        target = float(k - d)
        state = WeightState(np.arange(k), np.full(k, (k - d) / k))
        out = vertexify(state, fam, target)
        w = out.weights
        frac = np.sum((w > 1e-9) & (w < 1 - 1e-9))
        assert frac <= d + 1
        assert abs(w.sum() - target) <= 1e-9 * k
        assert np.max(np.abs(fam.vectors[out.support].T @ w)) <= 1e-9 * k
        assert np.all(w >= -1e-12) and np.all(w <= 1 + 1e-12)


def test_vertexify_infeasible_input_raises():
    fam = gen_random_zero_sum(3, 8, seed=3)
    state = WeightState(np.arange(8), np.full(8, 0.9))
    with pytest.raises(ValueError):
        vertexify(state, fam, 1.0)  # weight sum is 7.2, nowhere near 1


def test_drift_equals_gs_on_exact_zero_sum():
    fam = gen_two_dir(2, 4)
    a = gs_order(fam)
    b = drift_order(fam)
    assert np.array_equal(a.ordering.perm, b.ordering.perm)
    assert a.achieved == b.achieved


def test_drift_identical_copies():
    fam = VectorFamily(np.tile([[1.0, 0.0, 0.0]], (9, 1)))
    res = drift_order(fam)
    assert res.achieved <= 1e-12
    assert res.guarantee == pytest.approx(6.0)


def test_drift_guarantee_random():
    for seed in range(25):
        fam = gen_near_unit(4, 30, 0.5, seed=seed)
        res = drift_order(fam)
        assert res.achieved <= res.guarantee + 1e-9
        assert res.guarantee <= 8.0 + 1e-9


def test_greedy_antipodal_and_axis_pairs():
    fam = VectorFamily([[0.7, 0.0], [-0.7, 0.0]])
    assert greedy_order(fam).achieved == pytest.approx(0.7, abs=1e-12)

    d = 4
    rows = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        rows += [e, -e]
    res = greedy_order(VectorFamily(np.array(rows)))
    assert res.achieved <= 1.0 + 1e-12
    assert res.guarantee is None


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
@pytest.mark.parametrize("drift", [False, True])
def test_oracle_matches_brute_force(p, drift):
    for seed, n in [(0, 4), (1, 5), (2, 6), (3, 7)]:
        fam = gen_random_zero_sum(3, n, seed=seed, gauge=Gauge(p))
        res = oracle_order(fam, drift=drift)
        ref, _ = brute_force_min_max(fam.vectors, p, drift)
        assert res.achieved == pytest.approx(ref, abs=1e-9)


def test_oracle_not_worse_than_heuristics():
    for seed in range(8):
        fam = gen_random_zero_sum(2, 8, seed=seed)
        opt = oracle_order(fam).achieved
        assert opt <= gs_order(fam).achieved + 1e-9
        assert opt <= greedy_order(fam).achieved + 1e-9


def test_oracle_drift_equals_plain_on_exact_zero_sum():
    for fam in (gen_two_dir(3, 3), gen_hadamard(2)):
        plain = oracle_order(fam, drift=False)
        drifted = oracle_order(fam, drift=True)
        assert np.array_equal(plain.ordering.perm, drifted.ordering.perm)
        assert plain.achieved == drifted.achieved


def test_oracle_cap_refusal():
    fam = gen_near_unit(2, 21, 0.5, seed=0)
    with pytest.raises(ValueError):
        oracle_order(fam)
    with pytest.raises(ValueError):
        oracle_order(gen_near_unit(2, 5, 0.5, seed=0), cap=4)


def test_all_algos_scale_together():
    fam = gen_random_zero_sum(2, 9, seed=12)
    half = VectorFamily(fam.vectors * 0.5, fam.gauge)
    for algo in (greedy_order, oracle_order):
        a, b = algo(fam), algo(half)
        assert b.achieved == 0.5 * a.achieved
        assert np.array_equal(a.ordering.perm, b.ordering.perm)
