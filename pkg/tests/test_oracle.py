import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diamest.core import Dataset, NonSeparableError, cube, distance_exact
from diamest.oracle import enumerate_consistent, expected_diameter_uni, oracle_uni, oracle_vol
from diamest.perceptron import perceptron

from conftest import FAST, random_separable


def _brute_uni(tables):
    # independent route: average pairwise table distance with Fractions
    h = len(tables)
    size = len(tables[0].truth_table)
    total = sum(sum(a != b for a, b in zip(t1.truth_table, t2.truth_table)) for t1 in tables for t2 in tables)
    return Fraction(total, h * h * size)


def test_enumeration_examples():
    assert len(enumerate_consistent(Dataset.empty(1))) == 2
    two = enumerate_consistent(Dataset.from_points([((1, 1), 1)]))
    assert {t.truth_table for t in two} == {(1, 1, -1, -1), (1, -1, 1, -1)}
    full = Dataset.full_cube([1.0, 0.1])
    assert len(enumerate_consistent(full)) == 1


def test_threshold_function_counts():
    # self-dual threshold functions of n variables
    assert [len(enumerate_consistent(Dataset.empty(n))) for n in range(1, 5)] == [2, 4, 14, 104]


def test_enumeration_guard():
    with pytest.raises(ValueError):
        enumerate_consistent(Dataset.empty(5))


def test_tables_are_realizable():
    # every table is reproduced by a perceptron separator of the labeled cube
    for t in enumerate_consistent(Dataset.empty(4)):
        labeled = Dataset(cube(4).astype(float), np.array(t.truth_table), 4)
        w = perceptron(labeled, seed=1)
        assert tuple(np.where(cube(4) @ w >= 0, 1, -1)) == t.truth_table


@settings(max_examples=25)
@given(st.integers(1, 4), st.integers(0, 6), st.integers(0, 10**6))
def test_more_data_fewer_hypotheses(n, k, seed):
    d, _ = random_separable(n, k, seed)
    sub = Dataset(d.X[: k // 2], d.y[: k // 2], n)
    big = {t.truth_table for t in enumerate_consistent(d)}
    small = {t.truth_table for t in enumerate_consistent(sub)}
    assert big <= small
    assert big


@settings(max_examples=25)
@given(st.integers(1, 4), st.integers(0, 6), st.integers(0, 10**6))
def test_uni_matches_brute_force_and_range(n, k, seed):
    d, _ = random_separable(n, k, seed)
    tables = enumerate_consistent(d)
    exact = expected_diameter_uni(tables)
    assert exact == _brute_uni(tables)
    assert 0 <= exact <= Fraction(1, 2)


def test_oracle_uni_examples():
    assert oracle_uni(Dataset.empty(1)).params["diameter_exact"] == "1/2"
    r = oracle_uni(Dataset.from_points([((1, 1), 1)]))
    assert r.params["diameter_exact"] == "1/4" and r.diameter == 0.25
    assert r.params["c_of_H"] == 1
    assert oracle_uni(Dataset.full_cube([0.3, -1.0, 2.0])).params["diameter_exact"] == "0/1"


def test_oracle_uni_permutation_and_flip_invariance():
    tables = enumerate_consistent(Dataset.empty(3))
    base = expected_diameter_uni(tables)
    pts = cube(3)
    index = {tuple(p): i for i, p in enumerate(pts)}
    for perm in itertools.permutations(range(3)):
        moved = [type(t)(tuple(t.truth_table[index[tuple(p[list(perm)])]] for p in pts)) for t in tables]
        assert expected_diameter_uni(moved) == base
    flipped = [type(t)(tuple(-v for v in t.truth_table)) for t in tables]
    assert expected_diameter_uni(flipped) == base


def test_contradiction():
    d = Dataset.from_points([((1, 1), 1), ((1, 1), -1)])
    assert enumerate_consistent(d) == []
    with pytest.raises(NonSeparableError):
        oracle_uni(d)


def test_weak_count_recorded():
    assert oracle_uni(Dataset.empty(2)).params["weak_hypothesis_count"] == 9


def test_oracle_vol_examples(one_point):
    r = oracle_vol(one_point, 40_000, FAST)
    assert abs(r.diameter - 0.25) <= 0.005
    assert r.params["standard_error"] < 0.002
    assert abs(oracle_vol(Dataset.empty(3), 40_000, FAST).diameter - 0.5) <= 0.005
    assert oracle_vol(Dataset.full_cube([1.0, 2.0, -0.5]), 500, FAST).diameter == 0
