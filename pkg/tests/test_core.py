import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diamest.core import (Dataset, DimensionError, EstimateReport, LabeledPoint, cube, diameter_from_inner,
                          distance_exact, distance_mc, inner_from_diameter, restricted_distance, sign_eval,
                          signs, truth_table)

weights = st.integers(1, 8).flatmap(
    lambda n: st.lists(st.floats(-5, 5, allow_nan=False), min_size=n, max_size=n).map(np.array))


def pair_of(n):
    vec = st.lists(st.floats(-5, 5, allow_nan=False), min_size=n, max_size=n).map(np.array)
    return st.tuples(vec, vec)


def test_sign_eval_examples():
    assert sign_eval((1, 0), (1, 1)) == 1
    assert sign_eval((1, -1), (1, 1)) == 1
    assert sign_eval((-1, 2), (1, -1)) == -1


def test_sign_eval_dimension_mismatch():
    with pytest.raises(DimensionError):
        sign_eval((1, 0, 0), (1, 1))


def test_signs_zero_is_positive():
    assert list(signs([0.0, -0.0, -1e-300, 2])) == [1, 1, -1, 1]


def test_cube_order_is_f2_lexicographic():
    pts = cube(3)
    for b, row in enumerate(pts):
        bits = [(b >> (2 - j)) & 1 for j in range(3)]
        assert list(row) == [1 - 2 * bit for bit in bits]


def test_cube_guard():
    with pytest.raises(DimensionError):
        cube(26)


def test_distance_exact_examples():
    assert distance_exact((1, 2), (1, 2)) == 0
    assert distance_exact((1, 2), (-1, -2)) == 1
    assert distance_exact((1, 0), (0, 1)) == 0.5


def test_distance_exact_guard():
    with pytest.raises(DimensionError):
        distance_exact(np.ones(8), np.ones(8), limit=7)


def test_distance_exact_chunked_matches_direct():
    rng = np.random.default_rng(3)
    w1, w2 = rng.standard_normal(18), rng.standard_normal(18)
    direct = np.mean(truth_table(w1) != truth_table(w2))
    assert distance_exact(w1, w2) == direct


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(pair_of(n), pair_of(n))))
def test_distance_is_a_metric(data):
    (a, b), (c, _) = data
    assert distance_exact(a, b) == distance_exact(b, a)
    assert distance_exact(a, a) == 0
    assert distance_exact(a, c) <= distance_exact(a, b) + distance_exact(b, c) + 1e-15


@given(st.integers(1, 6).flatmap(pair_of))
def test_negation_identity_off_the_boundary(pair):
    a, b = pair
    n = len(a)
    pts = cube(n).astype(float)
    if np.all(np.abs(pts @ a) > 0) and np.all(np.abs(pts @ b) > 0):
        assert distance_exact(a, b) == 1 - distance_exact(a, -b)


def test_distance_mc_examples():
    assert distance_mc((1, 3), (1, 3), 2, 100, 5) == 0
    assert abs(distance_mc((1, 0), (0, 1), 2, 10**6, 5) - 0.5) <= 0.003
    assert distance_mc((1, 2), (-1, -2), 2, 10**4, 5) == 1


def test_distance_mc_deterministic_and_validated():
    a = distance_mc((1, -2, 3), (2, 1, 1), 3, 1000, 9)
    assert a == distance_mc((1, -2, 3), (2, 1, 1), 3, 1000, 9)
    with pytest.raises(ValueError):
        distance_mc((1,), (1,), 1, 0)


def test_distance_mc_converges():
    rng = np.random.default_rng(0)
    for n in (2, 5, 10):
        w1, w2 = rng.standard_normal(n), rng.standard_normal(n)
        assert abs(distance_mc(w1, w2, n, 10**6, n) - distance_exact(w1, w2)) <= 0.005


def test_restricted_distance_examples():
    assert restricted_distance((1, 0), (1, 1), [(1, 1)]) == 0
    assert restricted_distance((1, 0), (0, 1), [(1, -1), (-1, 1)]) == 1
    w1, w2 = (1, -2, 0.5), (0.3, 1, 1)
    assert restricted_distance(w1, w2, cube(3)) == distance_exact(w1, w2)
    with pytest.raises(ValueError):
        restricted_distance(w1, w2, np.zeros((0, 3)))


@given(st.integers(2, 6).flatmap(pair_of))
def test_restricted_distance_partition(pair):
    a, b = pair
    pts = cube(len(a))
    half = len(pts) // 2
    parts = [pts[:half], pts[half:]]
    total = sum(len(p) * restricted_distance(a, b, p) for p in parts) / len(pts)
    assert total == pytest.approx(distance_exact(a, b), abs=1e-15)


def test_diameter_inner_conversion():
    assert diameter_from_inner(1) == 0
    assert diameter_from_inner(0) == 0.5
    assert diameter_from_inner(-1) == 1
    assert inner_from_diameter(diameter_from_inner(0.3)) == pytest.approx(0.3)


def test_labeled_point_and_dataset_validation():
    with pytest.raises(ValueError):
        LabeledPoint((1, 1), 0)
    with pytest.raises(ValueError):
        Dataset.from_points([((1, 0), 1)])
    with pytest.raises(DimensionError):
        Dataset.from_points([((1, 1), 1), ((1, 1, 1), 1)])
    d = Dataset.from_points([LabeledPoint((1, -1), -1)])
    assert (d.n, d.k, len(d)) == (2, 1, 1)
    assert list(d.points()) == [LabeledPoint((1, -1), -1)]
    assert Dataset.from_points([((0.5, 2.0), 1)], space="real").space == "real"
    with pytest.raises(ValueError):
        d.X[0, 0] = 5


def test_full_cube_labels():
    d = Dataset.full_cube([1, 1])
    assert list(d.y) == [1, 1, 1, -1]


def test_estimate_report_relation():
    r = EstimateReport("dir", 0.2, 0.4)
    assert r.to_dict(timing=False)["duration_ms"] is None
    with pytest.raises(ValueError):
        EstimateReport("dir", 0.2, 0.3)
    with pytest.raises(ValueError):
        EstimateReport("nope", 0.0, 0.5)
    assert EstimateReport("angle", None, 0.7).diameter == 0.7
