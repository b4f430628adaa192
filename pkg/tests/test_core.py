import math

import numpy as np
import pytest

from steinitz import (
    Gauge,
    Ordering,
    VectorFamily,
    center_family,
    family_sum,
    gauge_norm,
    gen_simplex,
    gen_two_dir,
    philox_generator,
    prefix_report,
)
from steinitz.core import tree_prefix_sums, tree_sum


def test_gauge_norm_trivial_values():
    assert gauge_norm([0.0, 0.0, 0.0], Gauge(2.0)) == 0.0
    assert gauge_norm([3.0, 4.0], Gauge(2.0)) == 5.0
    assert gauge_norm([1.0, -1.0, 1.0], Gauge.linf()) == 1.0
    assert gauge_norm([1.0, -1.0, 1.0], Gauge(1.0)) == 3.0


def test_euclidean_is_lp2_bit_identical():
    rng = philox_generator(11)
    v = rng.standard_normal(9)
    assert gauge_norm(v, Gauge.euclidean()) == gauge_norm(v, Gauge.lp(2.0))
    assert Gauge.euclidean() == Gauge.lp(2.0)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, math.inf])
def test_triangle_inequality_random(p):
    rng = philox_generator(23)
    g = Gauge(p)
    for _ in range(100):
        a = rng.standard_normal(5)
        b = rng.standard_normal(5)
        assert gauge_norm(a + b, g) <= gauge_norm(a, g) + gauge_norm(b, g) + 1e-12


def test_gauge_homogeneity_and_zero():
    rng = philox_generator(3)
    v = rng.standard_normal(6)
    for p in (1.0, 2.0, 4.0, math.inf):
        assert gauge_norm(2.0 * v, Gauge(p)) == pytest.approx(2.0 * gauge_norm(v, Gauge(p)), rel=1e-14)
        assert gauge_norm(np.zeros(6), Gauge(p)) == 0.0


def test_gauge_validation():
    with pytest.raises(ValueError):
        Gauge(0.5)
    with pytest.raises(ValueError):
        Gauge(float("nan"))


def test_family_sum_trivials():
    assert np.array_equal(family_sum(VectorFamily([[1.0, 0.0], [-1.0, 0.0]])), [0.0, 0.0])
    assert np.array_equal(family_sum(VectorFamily([[1.0, 2.0]])), [1.0, 2.0])
    with pytest.raises(ValueError):
        family_sum(VectorFamily(np.zeros((0, 2))))


def test_family_sum_simplex_d3():
    total = family_sum(gen_simplex(3))
    assert np.max(np.abs(total)) <= 1e-12


def test_family_rejects_nonfinite():
    with pytest.raises(ValueError):
        VectorFamily([[1.0, float("nan")]])
    with pytest.raises(ValueError):
        VectorFamily([[float("inf"), 0.0]])


def test_family_matrix_is_readonly():
    fam = VectorFamily([[1.0, 0.0]])
    with pytest.raises(ValueError):
        fam.vectors[0, 0] = 2.0


def test_ordering_validation():
    with pytest.raises(ValueError):
        Ordering([0, 0])
    with pytest.raises(ValueError):
        Ordering([1, 2])
    assert Ordering([1, 0], drift=True).drift is True


def test_prefix_report_two_vectors():
    fam = VectorFamily([[1.0, 0.0], [-1.0, 0.0]])
    rep = prefix_report(fam, Ordering([0, 1]))
    assert np.array_equal(rep.per_prefix_norms, [1.0, 0.0])
    assert rep.max_norm == 1.0
    assert rep.argmax_k == 1


def test_prefix_report_mismatch():
    fam = VectorFamily([[1.0, 0.0], [-1.0, 0.0]])
    with pytest.raises(ValueError):
        prefix_report(fam, Ordering([0, 1, 2]))


def test_last_prefix_zero_sum_plain():
    from steinitz import gen_random_zero_sum

    fam = gen_random_zero_sum(3, 17, seed=5)
    rep = prefix_report(fam, Ordering(np.arange(17)))
    assert rep.per_prefix_norms[-1] <= 1e-12 * 17


def test_last_prefix_drift_exact_zero():
    from steinitz import gen_near_unit

    fam = gen_near_unit(4, 13, 0.5, seed=8)
    rep = prefix_report(fam, Ordering(np.arange(13), drift=True))
    assert rep.per_prefix_norms[-1] == 0.0


def test_drift_equals_plain_on_zero_sum():
    fam = gen_two_dir(3, 4)  # sums to zero exactly
    plain = prefix_report(fam, Ordering(np.arange(8)))
    drift = prefix_report(fam, Ordering(np.arange(8), drift=True))
    assert np.array_equal(plain.per_prefix_norms, drift.per_prefix_norms)

    from steinitz import gen_random_zero_sum

    fam = gen_random_zero_sum(3, 12, seed=2)
    plain = prefix_report(fam, Ordering(np.arange(12)))
    drift = prefix_report(fam, Ordering(np.arange(12), drift=True))
    assert np.allclose(plain.per_prefix_norms, drift.per_prefix_norms, atol=1e-12)


def test_reversal_complements_prefix_norms():
    from steinitz import gen_random_zero_sum

    fam = gen_random_zero_sum(4, 15, seed=4)
    perm = np.arange(15)
    fwd = prefix_report(fam, Ordering(perm)).per_prefix_norms
    rev = prefix_report(fam, Ordering(perm[::-1])).per_prefix_norms
    for k in range(1, 15):
        assert rev[k - 1] == pytest.approx(fwd[15 - k - 1], abs=1e-9)


def test_center_family_mean_subtraction():
    fam = VectorFamily([[2.0, 0.0], [0.0, 0.0]])
    out = center_family(fam)
    assert np.array_equal(out.vectors, [[1.0, 0.0], [-1.0, 0.0]])


def test_center_family_zero_sum_is_identity():
    fam = gen_two_dir(2, 3)
    out = center_family(fam)
    assert np.array_equal(out.vectors, fam.vectors)


def test_center_family_norm_doubling_and_idempotence():
    from steinitz import gen_near_unit
    from steinitz.core import row_norms

    for seed in range(100):
        fam = gen_near_unit(3, 11, 1.0, seed=seed)
        out = center_family(fam)
        assert np.max(np.abs(tree_sum(out.vectors))) <= 1e-12 * 11
        assert np.max(row_norms(out.vectors, fam.gauge)) <= 2.0 * np.max(row_norms(fam.vectors, fam.gauge)) + 1e-12
        again = center_family(out)
        assert np.allclose(again.vectors, out.vectors, atol=1e-12)


def test_tree_sums_match_numpy():
    rng = philox_generator(31)
    for n in (1, 2, 3, 7, 64, 1000):
        rows = rng.standard_normal((n, 3))
        assert np.allclose(tree_sum(rows), rows.sum(axis=0), atol=1e-12)
        assert np.allclose(tree_prefix_sums(rows), np.cumsum(rows, axis=0), atol=1e-12)


def test_tree_prefix_accuracy_large_n():
    # alternating +-1 pattern: every prefix is exactly representable
    n = 10**5
    rows = np.ones((n, 1))
    rows[1::2] = -1.0
    pref = tree_prefix_sums(rows)[:, 0]
    expect = np.where(np.arange(1, n + 1) % 2, 1.0, 0.0)
    assert np.array_equal(pref, expect)
