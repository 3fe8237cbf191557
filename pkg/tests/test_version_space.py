import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import kstest

from diamest.core import Dataset, DimensionError, NonSeparableError
from diamest.version_space import ChainConfig, HitAndRun, VersionSpace, hit_and_run, initial_point

from conftest import random_separable


def test_contains_examples(one_point):
    assert VersionSpace(Dataset.empty(3)).contains(np.zeros(3))
    assert VersionSpace(one_point).contains((0.5, 0.5))
    assert not VersionSpace(one_point).contains((-0.5, -0.5))
    assert not VersionSpace(one_point).contains((0.8, 0.8))
    with pytest.raises(DimensionError):
        VersionSpace(one_point).contains((0.1, 0.1, 0.1))


def test_chord_examples():
    V = VersionSpace(Dataset.empty(3))
    assert V.chord(np.zeros(3), np.eye(3)[0]) == pytest.approx((-1, 1))
    half = VersionSpace(Dataset.from_points([((1, 1, 1), 1), ((1, -1, 1), 1), ((1, 1, -1), 1), ((1, -1, -1), 1)]))
    # these four constraints together say w1 >= |w2| + |w3|; along e1 from 0 only w1 >= 0 binds
    assert half.chord(np.zeros(3), np.eye(3)[0]) == pytest.approx((0, 1))
    edge = np.array([1.0, 0, 0])
    lo, hi = V.chord(edge, np.array([0.0, 1, 0]))
    assert lo <= 0 <= hi and hi - lo < 1e-7


def test_chord_errors(one_point):
    V = VersionSpace(one_point)
    with pytest.raises(ValueError):
        V.chord((0.5, 0.5), (0, 0))
    with pytest.raises(ValueError):
        V.chord((-0.5, -0.5), (1, 0))


def _chord_properties(V, v, l):
    lo, hi = V.chord(v, l)
    assert lo <= 0 <= hi
    A = V.A
    for t in (lo, hi):
        p = v + t * l
        slack = [abs(1 - np.linalg.norm(p))] + list(np.abs(A @ p)) if len(A) else [abs(1 - np.linalg.norm(p))]
        assert min(slack) <= 1e-9
    for t in np.linspace(lo, hi, 100):
        assert V.contains(v + t * l)
    if hi - lo > 1e-6:
        assert not V.contains(v + (lo - 1e-6) * l)
        assert not V.contains(v + (hi + 1e-6) * l)


@given(st.integers(2, 6), st.integers(0, 8), st.integers(0, 10**6))
def test_chord_property(n, k, seed):
    d, _ = random_separable(n, k, seed)
    V = VersionSpace(d)
    rng = np.random.default_rng(seed)
    v = HitAndRun(V, ChainConfig(warmup=200, thinning=1, seed=seed)).point
    _chord_properties(V, v, rng.standard_normal(n))


def test_initial_point():
    p = initial_point(Dataset.empty(4))
    assert np.linalg.norm(p) == pytest.approx(0.5)
    q = initial_point(Dataset.from_points([((1, 1), 1)]))
    assert q.sum() > 0 and np.linalg.norm(q) == pytest.approx(0.5)
    with pytest.raises(NonSeparableError):
        initial_point(Dataset.from_points([((1, -1), 1), ((1, -1), -1)]))


def test_chain_config_validation():
    with pytest.raises(ValueError):
        ChainConfig(warmup=-1)
    with pytest.raises(ValueError):
        ChainConfig(thinning=0)
    with pytest.raises(ValueError):
        hit_and_run(Dataset.empty(2), ChainConfig(), 0)


def test_samples_inside_and_deterministic(fast_chain):
    d, _ = random_separable(4, 6, 1)
    W = hit_and_run(d, fast_chain, 500)
    V = VersionSpace(d)
    assert all(V.contains(w) for w in W)
    assert np.array_equal(W, hit_and_run(d, fast_chain, 500))


def test_markov_restart(fast_chain):
    d, _ = random_separable(3, 4, 2)
    W = HitAndRun(d, fast_chain).sample(30)
    resumed = HitAndRun(d, fast_chain, start=W[9], offset=10).sample(20)
    assert np.array_equal(resumed, W[10:])


def test_empty_dataset_symmetry(fast_chain):
    W = hit_and_run(Dataset.empty(3), fast_chain, 10_000)
    assert np.all(np.abs(W.mean(axis=0)) < 0.02)
    radii = np.linalg.norm(W, axis=1) ** 3
    assert kstest(radii, "uniform").statistic <= 0.02


def test_mirror_symmetry(fast_chain, one_point):
    W = hit_and_run(one_point, fast_chain, 10_000)
    assert abs(np.mean(W[:, 0] >= 0) - np.mean(W[:, 1] >= 0)) < 0.02
