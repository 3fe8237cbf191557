"""The version space and a Hit-and-Run sampler over it.

The version space of a dataset is ``{w : y_i (w . x_i) >= 0 for all i,
||w|| <= 1}``. Sampling it uniformly gives the volume distribution over
consistent halfspaces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .core import Dataset, DimensionError, NonSeparableError
from .perceptron import perceptron
from .seeding import DEFAULT_SEED, derive, rng_for

DEGENERATE_WIDTH = 1e-12
MAX_REDRAWS = 100
_WARMUP_BLOCK = 1 << 15
_SLACK = 8


class DegenerateChordError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChainConfig:
    warmup: int = 100_000
    thinning: int = 500
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def with_seed(self, seed: int) -> "ChainConfig":
        return replace(self, seed=int(seed))


@njit(cache=True)
def _chord(A, v, l):
    lo = -np.inf
    hi = np.inf
    k, n = A.shape
    for i in range(k):
        al = 0.0
        av = 0.0
        for j in range(n):
            al += A[i, j] * l[j]
            av += A[i, j] * v[j]
        if al > 0.0:
            t = -av / al
            if t > lo:
                lo = t
        elif al < 0.0:
            t = -av / al
            if t < hi:
                hi = t
    vl = 0.0
    vv = 0.0
    ll = 0.0
    for j in range(n):
        vl += v[j] * l[j]
        vv += v[j] * v[j]
        ll += l[j] * l[j]
    # ||v + t l||^2 <= 1
    disc = vl * vl - ll * (vv - 1.0)
    if disc < 0.0:
        disc = 0.0
    sq = math.sqrt(disc)
    c1 = (-vl - sq) / ll
    c2 = (-vl + sq) / ll
    if c1 > lo:
        lo = c1
    if c2 < hi:
        hi = c2
    # v is feasible up to rounding, so 0 belongs to the chord
    if lo > 0.0:
        lo = 0.0
    if hi < 0.0:
        hi = 0.0
    return lo, hi


@njit(cache=True)
def _walk(A, v, dirs, us, nsteps, degenerate, max_redraws, width):
    """Advance ``v`` in place; returns (steps taken, consecutive degenerate draws)."""
    n = v.shape[0]
    l = np.empty(n)
    steps = 0
    for idx in range(dirs.shape[0]):
        s = 0.0
        for j in range(n):
            l[j] = dirs[idx, j]
            s += l[j] * l[j]
        s = math.sqrt(s)
        if s == 0.0:
            degenerate += 1
            if degenerate > max_redraws:
                return steps, degenerate
            continue
        for j in range(n):
            l[j] /= s
        lo, hi = _chord(A, v, l)
        if hi - lo < width:
            degenerate += 1
            if degenerate > max_redraws:
                return steps, degenerate
            continue
        degenerate = 0
        t = lo + us[idx] * (hi - lo)
        for j in range(n):
            v[j] += t * l[j]
        steps += 1
        if steps == nsteps:
            return steps, degenerate
    return steps, degenerate


class VersionSpace:
    def __init__(self, dataset: Dataset, tolerance: float = 1e-12):
        self.dataset = dataset
        self.tolerance = tolerance
        self.A = np.ascontiguousarray(dataset.constraints, dtype=float)

    @property
    def n(self) -> int:
        return self.dataset.n

    def _check(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.n,):
            raise DimensionError(f"expected a vector of length {self.n}, got shape {w.shape}")
        return w

    def contains(self, w) -> bool:
        w = self._check(w)
        if self.A.shape[0] and np.min(self.A @ w) < -self.tolerance:
            return False
        return float(np.linalg.norm(w)) <= 1.0 + self.tolerance

    def chord(self, v, l) -> tuple[float, float]:
        """The interval ``[t1, t2]`` of t with ``v + t l`` in the version space."""
        v = self._check(v)
        l = self._check(l)
        if not np.any(l):
            raise ValueError("zero direction")
        if not self.contains(v):
            raise ValueError("chord base point lies outside the version space")
        return _chord(self.A, np.ascontiguousarray(v), np.ascontiguousarray(l))

    def initial_point(self, seed: int = 0) -> np.ndarray:
        return initial_point(self.dataset, seed)


def initial_point(d: Dataset, seed: int = 0) -> np.ndarray:
    """A point strictly inside the version space, of norm 1/2."""
    if d.k == 0:
        return np.full(d.n, 1.0 / (2.0 * math.sqrt(d.n)))
    try:
        w = perceptron(d, seed)
    except NonSeparableError as exc:
        raise NonSeparableError(f"dataset is not strictly separable: {exc}") from None
    return 0.5 * w / np.linalg.norm(w)


class HitAndRun:
    """A Hit-and-Run chain over a version space.

    After ``warmup`` steps the chain emits one sample every ``thinning``
    steps. The randomness between sample ``j-1`` and sample ``j`` comes from
    the stream ``(seed, "sample", j)``, so restarting with
    ``start=samples[j-1]`` and ``offset=j`` replays the rest of the chain.
    """

    def __init__(self, space: VersionSpace | Dataset, config: ChainConfig = ChainConfig(),
                 start=None, offset: int = 0):
        self.space = space if isinstance(space, VersionSpace) else VersionSpace(space)
        self.config = config
        self.emitted = offset
        self.steps = 0
        if start is None:
            self.point = initial_point(self.space.dataset, derive(config.seed, "start"))
            self._advance(config.warmup, rng_for(config.seed, "warmup"), _WARMUP_BLOCK)
        else:
            start = np.array(start, dtype=float)
            if not self.space.contains(start):
                raise ValueError("start point is outside the version space")
            self.point = start

    def _advance(self, nsteps: int, rng: np.random.Generator, block: int) -> None:
        n = self.space.n
        degenerate = 0
        left = nsteps
        while left > 0:
            size = min(block, left) + _SLACK
            dirs = rng.standard_normal((size, n))
            us = rng.random(size)
            done, degenerate = _walk(self.space.A, self.point, dirs, us, left,
                                     degenerate, MAX_REDRAWS, DEGENERATE_WIDTH)
            left -= done
            self.steps += done
            if degenerate > MAX_REDRAWS:
                raise DegenerateChordError(
                    f"{MAX_REDRAWS} consecutive degenerate chords; the version space may have empty interior")

    def sample(self, count: int) -> np.ndarray:
        if count < 0:
            raise ValueError("count must be >= 0")
        out = np.empty((count, self.space.n))
        thin = self.config.thinning
        for i in range(count):
            self._advance(thin, rng_for(self.config.seed, "sample", self.emitted), thin)
            out[i] = self.point
            self.emitted += 1
        return out


def hit_and_run(space: VersionSpace | Dataset, config: ChainConfig, count: int) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be >= 1")
    return HitAndRun(space, config).sample(count)


def chain_seed(seed: int, purpose: str, index: int = 0) -> int:
    """Seed of chain ``index`` within a run tagged ``purpose``."""
    return derive(seed, purpose, index)
