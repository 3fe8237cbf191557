"""Hypercube symmetries and the orbit-sum speedup for subcube datasets.

Points are +-1 vectors; the F2 view (0 <-> +1, 1 <-> -1) turns F2 addition
into a pointwise product. An automorphism ``sigma = (pi, v)`` acts as
``sigma(x)_i = x_{pi(i)} * v_i``, with ``pi`` a 0-based permutation.

When the labeled points form a (v, I)-subcube X, the cube splits into the
cosets ``X * u``. Cosets whose shift u has the same Hamming weight outside I
share their restricted expected distance, so the diameter is a sum over
q + 1 weight classes (q = n - |I|) instead of 2^q cosets.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Dataset, EstimateReport, NonSeparableError, cube, signs
from .seeding import rng_for
from .version_space import ChainConfig, HitAndRun, VersionSpace, chain_seed

EXACT_COSET_LIMIT = 20


def _pm1(v, n: int | None = None) -> tuple[int, ...]:
    out = tuple(int(c) for c in v)
    if any(c not in (1, -1) for c in out):
        raise ValueError("shift vectors must have entries +1 or -1")
    if n is not None and len(out) != n:
        raise ValueError(f"expected length {n}")
    return out


@dataclass(frozen=True)
class Automorphism:
    pi: tuple
    v: tuple

    def __post_init__(self):
        pi = tuple(int(i) for i in self.pi)
        if sorted(pi) != list(range(len(pi))):
            raise ValueError("pi must be a permutation of 0..n-1")
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "v", _pm1(self.v, len(pi)))

    @property
    def n(self) -> int:
        return len(self.pi)

    @classmethod
    def identity(cls, n: int) -> "Automorphism":
        return cls(tuple(range(n)), (1,) * n)

    def apply(self, x) -> np.ndarray:
        """Works on one point or on a matrix whose rows are points."""
        x = np.asarray(x)
        if x.shape[-1] != self.n:
            raise ValueError(f"point dimension {x.shape[-1]} != {self.n}")
        return x[..., list(self.pi)] * np.asarray(self.v)

    def inverse(self) -> "Automorphism":
        inv = np.argsort(self.pi)
        return Automorphism(tuple(inv), tuple(np.asarray(self.v)[inv]))

    def then(self, other: "Automorphism") -> "Automorphism":
        """``other`` after ``self``: x -> other(self(x))."""
        p1, p2 = np.asarray(self.pi), np.asarray(other.pi)
        return Automorphism(tuple(p1[p2]), tuple(np.asarray(self.v)[p2] * np.asarray(other.v)))

    def transform_weights(self, w) -> np.ndarray:
        """w' with sign(w' . x) = sign(w . sigma(x)) for every x."""
        w = np.asarray(w, dtype=float)
        return (w * np.asarray(self.v))[np.argsort(self.pi)]


def apply_automorphism(sigma: Automorphism, x) -> np.ndarray:
    return sigma.apply(x)


def invert_automorphism(sigma: Automorphism) -> Automorphism:
    return sigma.inverse()


@dataclass(frozen=True)
class SubcubeStructure:
    """X = {x : x_j = v_j for j outside I}, with v canonical (+1 on I)."""

    v: tuple
    I: tuple

    def __post_init__(self):
        v = _pm1(self.v)
        I = tuple(sorted(set(int(i) for i in self.I)))
        if I and not (0 <= I[0] and I[-1] < len(v)):
            raise ValueError("I must index coordinates of v")
        if any(v[i] != 1 for i in I):
            raise ValueError("v must be +1 on I")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "I", I)

    @property
    def n(self) -> int:
        return len(self.v)

    @property
    def q(self) -> int:
        return self.n - len(self.I)

    @property
    def outside(self) -> tuple:
        return tuple(j for j in range(self.n) if j not in set(self.I))

    def coset(self, u) -> np.ndarray:
        """All points of X * u (u must be +1 on I)."""
        u = np.asarray(_pm1(u, self.n))
        if len(self.I) > 25:
            raise ValueError("coset too large to enumerate")
        pts = np.tile(np.asarray(self.v, dtype=np.int8) * u.astype(np.int8), (2 ** len(self.I), 1))
        pts[:, list(self.I)] = cube(len(self.I))
        return pts

    def points(self) -> np.ndarray:
        return self.coset((1,) * self.n)

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return all(x[j] == self.v[j] for j in self.outside)


def detect_subcube(X) -> SubcubeStructure | None:
    """The (v, I)-subcube equal to the point set X, or None."""
    pts = np.unique(np.asarray(X, dtype=np.int64).reshape(len(X), -1), axis=0)
    if pts.shape[0] == 0:
        raise ValueError("X must be nonempty")
    varies = [j for j in range(pts.shape[1]) if np.any(pts[:, j] != pts[0, j])]
    if len(varies) > 62 or pts.shape[0] != 2 ** len(varies):
        return None
    v = pts[0].copy()
    v[varies] = 1
    return SubcubeStructure(tuple(int(c) for c in v), tuple(varies))


@dataclass(frozen=True)
class OrbitClass:
    weight: int
    size: int
    representative: tuple


def orbit_representatives(s: SubcubeStructure) -> list[OrbitClass]:
    """One shift per weight 0..q: the lowest-index coordinates outside I flipped."""
    out = []
    for i in range(s.q + 1):
        u = [1] * s.n
        for j in s.outside[:i]:
            u[j] = -1
        out.append(OrbitClass(i, math.comb(s.q, i), tuple(u)))
    return out


def stabilizer_element(s: SubcubeStructure, pi: Sequence[int]) -> Automorphism:
    """(pi, pi(v) * v), which fixes every point of X when pi fixes I pointwise."""
    pi = tuple(int(i) for i in pi)
    if len(pi) != s.n:
        raise ValueError("permutation has the wrong length")
    if any(pi[i] != i for i in s.I):
        raise ValueError("pi must fix every coordinate of I")
    v = np.asarray(s.v)
    return Automorphism(pi, tuple(v[list(pi)] * v))


def shift_weight(s: SubcubeStructure, u) -> int:
    return sum(1 for j in s.outside if u[j] == -1)


# ---------------------------------------------------------------- truncation


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


@dataclass(frozen=True)
class TruncationParams:
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError("c must be positive")

    def window(self, q: int) -> list[int]:
        """Integers r in [0, q] with |r - q/2| <= floor(c sqrt(q))."""
        half = math.floor(self.c * math.sqrt(q))
        return [r for r in range(q + 1) if abs(2 * r - q) <= 2 * half]

    @property
    def bound(self) -> float:
        return 1.0 - normal_cdf(2 * self.c) + normal_cdf(-2 * self.c)


def omitted_mass(q: int, window: Iterable[int]) -> float:
    keep = set(window)
    return math.fsum(math.comb(q, i) for i in range(q + 1) if i not in keep) / 2**q


# ---------------------------------------------------------------- estimate


def _check_structure(d: Dataset, s: SubcubeStructure) -> None:
    if d.space != "boolean":
        raise ValueError("structured estimation needs a boolean dataset")
    if d.n != s.n:
        raise ValueError("structure and dataset dimensions differ")
    found = detect_subcube(d.X) if d.k else None
    if found is None:
        raise ValueError("the labeled points do not form a (v, I)-subcube")
    if found != s:
        raise ValueError(f"structure mismatch: the data is the subcube v={found.v}, I={found.I}")
    labels: dict = {}
    for x, y in zip(map(tuple, d.X.astype(int)), d.y):
        if labels.setdefault(x, y) != y:
            raise NonSeparableError("a point carries both labels")


def structured_diameter(d: Dataset, s: SubcubeStructure, trunc: TruncationParams | None = None,
                        pair_budget: int = 10_000, config: ChainConfig = ChainConfig(),
                        partitions: int = 1, exact_limit: int = EXACT_COSET_LIMIT,
                        coset_samples: int = 4096) -> EstimateReport:
    """Orbit-sum diameter estimate; ``trunc=None`` keeps every weight class.

    Each pair contributes sum_i C(q,i) 2^-q d_{C_i}(h1, h2) over the weight
    window. Cosets larger than 2^exact_limit are subsampled.
    """
    if pair_budget < 1:
        raise ValueError("pair_budget must be >= 1")
    _check_structure(d, s)
    t0 = time.perf_counter()
    q = s.q
    window = list(range(1, q + 1)) if trunc is None else [i for i in trunc.window(q) if i >= 1]
    reps = {c.weight: c for c in orbit_representatives(s)}
    rng = rng_for(config.seed, "structured_cosets")
    cosets = {}
    for i in window:
        u = reps[i].representative
        if len(s.I) <= exact_limit:
            cosets[i] = s.coset(u).astype(float)
        else:
            pts = 1.0 - 2.0 * rng.integers(0, 2, size=(coset_samples, s.n))
            base = np.asarray(s.v) * np.asarray(u)
            pts[:, list(s.outside)] = base[list(s.outside)]
            cosets[i] = pts
    space = VersionSpace(d)
    values = np.zeros(pair_budget)
    per_class = {i: 0.0 for i in window}
    bounds = np.linspace(0, pair_budget, partitions + 1).astype(int)
    for p in range(partitions):
        lo, hi = int(bounds[p]), int(bounds[p + 1])
        if hi == lo:
            continue
        left = HitAndRun(space, config.with_seed(chain_seed(config.seed, "structured", 2 * p)))
        right = HitAndRun(space, config.with_seed(chain_seed(config.seed, "structured", 2 * p + 1)))
        W1, W2 = left.sample(hi - lo), right.sample(hi - lo)
        for i, C in cosets.items():
            dist = np.mean(signs(W1 @ C.T) != signs(W2 @ C.T), axis=1)
            values[lo:hi] += math.comb(q, i) / 2**q * dist
            per_class[i] += float(np.sum(dist))
    diameter = math.fsum(values) / pair_budget
    se = float(np.std(values, ddof=1) / math.sqrt(pair_budget)) if pair_budget > 1 else float("nan")
    bound = 0.0 if trunc is None else trunc.bound
    params = {"mode": "full" if trunc is None else "truncated", "c": None if trunc is None else trunc.c,
              "q": q, "I": list(s.I), "v": list(s.v), "window": window, "truncation_bound": bound,
              "omitted_mass": omitted_mass(q, [0] + window), "standard_error": se,
              "class_means": {str(i): per_class[i] / pair_budget for i in window},
              "coset_mode": "exact" if len(s.I) <= exact_limit else f"sampled({coset_samples})",
              "warmup": config.warmup, "thinning": config.thinning, "partitions": partitions}
    inner = 1.0 - 2.0 * diameter
    return EstimateReport("structured", inner, (1.0 - inner) / 2.0, params, config.seed,
                          {"version_space_samples": 2 * pair_budget, "pairs": pair_budget},
                          (time.perf_counter() - t0) * 1e3)
