import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from diamest.core import Dataset
from diamest.version_space import ChainConfig

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# short chains for n <= 5; mixing there takes a few dozen steps
FAST = ChainConfig(warmup=5_000, thinning=25, seed=11)


@pytest.fixture
def fast_chain():
    return FAST


@pytest.fixture
def one_point():
    return Dataset.from_points([((1, 1), 1)])


def random_separable(n, k, seed):
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(n)
    X = 1.0 - 2.0 * rng.integers(0, 2, size=(k, n))
    return Dataset(X, np.where(X @ w >= 0, 1, -1), n), w


def subcube_dataset(n, size_I, seed):
    """The (v, I)-subcube labeled by a random Gaussian w; returns (Dataset, SubcubeStructure)."""
    from diamest.structure import SubcubeStructure

    rng = np.random.default_rng(seed)
    I = sorted(rng.choice(n, size=size_I, replace=False).tolist())
    v = [1 if j in I else int(rng.choice([-1, 1])) for j in range(n)]
    s = SubcubeStructure(tuple(v), tuple(I))
    X = s.points().astype(float)
    w = rng.standard_normal(n)
    return Dataset(X, np.where(X @ w >= 0, 1, -1), n), s
