"""Domain types, the sign convention and disagreement distances.

Points live in {+1, -1}^n and a halfspace is ``h(x) = sign(w . x)``.
Throughout the package ``sign(0) = +1``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterator, Sequence

import numpy as np

from .seeding import rng_for

ENUMERATION_LIMIT = 25


class DimensionError(ValueError):
    pass


class NonSeparableError(ValueError):
    """The dataset admits no strict homogeneous separator."""


@dataclass(frozen=True)
class LabeledPoint:
    x: tuple
    y: int

    def __post_init__(self):
        if self.y not in (1, -1):
            raise ValueError(f"label must be +1 or -1, got {self.y!r}")


@dataclass(frozen=True, eq=False)
class Dataset:
    """k labeled points in dimension n.

    ``X`` has shape (k, n) and ``y`` shape (k,). In ``boolean`` mode every
    coordinate is exactly +1 or -1; ``real`` mode is only meant for the
    angle estimator.
    """

    X: np.ndarray
    y: np.ndarray
    n: int
    space: str = "boolean"

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float).reshape(-1, self.n) if np.size(self.X) else np.zeros((0, self.n))
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise DimensionError(f"{X.shape[0]} points but {y.shape[0]} labels")
        if self.space not in ("boolean", "real"):
            raise ValueError(f"unknown space kind {self.space!r}")
        if not np.all(np.isin(y, (1, -1))):
            raise ValueError("labels must be +1 or -1")
        if self.space == "boolean" and not np.all(np.isin(X, (1.0, -1.0))):
            raise ValueError("boolean datasets need every coordinate in {+1, -1}")
        if not np.all(np.isfinite(X)):
            raise ValueError("non-finite coordinate")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_points(cls, points: Sequence, n: int | None = None, space: str = "boolean") -> "Dataset":
        """Build from ``[(x, y), ...]`` or a sequence of :class:`LabeledPoint`."""
        xs, ys = [], []
        for p in points:
            x, y = (p.x, p.y) if isinstance(p, LabeledPoint) else p
            xs.append(list(x))
            ys.append(int(y))
        if n is None:
            if not xs:
                raise DimensionError("dimension of an empty dataset must be given")
            n = len(xs[0])
        if any(len(x) != n for x in xs):
            raise DimensionError("all points must share dimension n")
        return cls(np.array(xs, dtype=float).reshape(len(xs), n), np.array(ys, dtype=np.int64), n, space)

    @classmethod
    def empty(cls, n: int, space: str = "boolean") -> "Dataset":
        return cls(np.zeros((0, n)), np.zeros(0, dtype=np.int64), n, space)

    @classmethod
    def full_cube(cls, w) -> "Dataset":
        """Every cube point, labeled by ``sign(w . x)``."""
        w = np.asarray(w, dtype=float)
        pts = cube(len(w)).astype(float)
        return cls(pts, signs(pts @ w), len(w))

    @property
    def k(self) -> int:
        return self.X.shape[0]

    @property
    def constraints(self) -> np.ndarray:
        """Rows ``y_i x_i``; w is consistent iff every row has ``row . w >= 0``."""
        return self.X * self.y[:, None]

    def points(self) -> Iterator[LabeledPoint]:
        for x, y in zip(self.X, self.y):
            yield LabeledPoint(tuple(int(v) if self.space == "boolean" else float(v) for v in x), int(y))

    def __len__(self):
        return self.k

    def __repr__(self):
        return f"Dataset(n={self.n}, k={self.k}, space={self.space!r})"


@dataclass
class EstimateReport:
    method: str
    inner_estimate: float | None
    diameter: float
    params: dict = field(default_factory=dict)
    seed: int = 0
    samples_used: dict = field(default_factory=dict)
    duration_ms: float | None = None

    METHODS = ("dir", "alt", "fourier", "angle", "oracle_uni", "oracle_vol", "structured")

    def __post_init__(self):
        if self.method not in self.METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.inner_estimate is not None and not math.isclose(
                self.diameter, diameter_from_inner(self.inner_estimate), rel_tol=0, abs_tol=1e-15):
            raise ValueError("diameter must equal (1 - inner_estimate) / 2")

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        return {
            "method": self.method,
            "inner_estimate": self.inner_estimate,
            "diameter": self.diameter,
            "params": self.params,
            "seed": int(self.seed),
            "samples_used": self.samples_used,
            "duration_ms": self.duration_ms if timing else None,
        }


def signs(values) -> np.ndarray:
    """Elementwise sign with the sign(0) = +1 convention, as int8."""
    return np.where(np.asarray(values) >= 0, 1, -1).astype(np.int8)


def sign_eval(w, x) -> int:
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    if w.shape != x.shape:
        raise DimensionError(f"w has shape {w.shape}, x has shape {x.shape}")
    return 1 if float(w @ x) >= 0 else -1


@lru_cache(maxsize=32)
def _cube(n: int) -> np.ndarray:
    # +1 before -1 in every coordinate: lexicographic order of the F2 encoding.
    pts = np.array(list(itertools.product((1, -1), repeat=n)), dtype=np.int8).reshape(2**n, n)
    pts.setflags(write=False)
    return pts


def cube(n: int) -> np.ndarray:
    """All 2^n points of {+1,-1}^n, row ``b`` is the F2 encoding of ``b``."""
    if n > ENUMERATION_LIMIT:
        raise DimensionError(f"refusing to enumerate 2^{n} cube points")
    return _cube(n)


def truth_table(w, n: int | None = None) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    return signs(cube(n or len(w)) @ w)


def distance_exact(w1, w2, n: int | None = None, limit: int = ENUMERATION_LIMIT) -> float:
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    n = len(w1) if n is None else n
    if w1.shape != (n,) or w2.shape != (n,):
        raise DimensionError("weight vectors must have length n")
    if n > limit:
        raise DimensionError(f"n={n} exceeds the enumeration guard {limit}")
    disagree = 0
    # chunk over the leading coordinates to bound memory at large n
    head = max(0, n - 16)
    tail = cube(n - head).astype(float)
    for prefix in itertools.product((1.0, -1.0), repeat=head):
        base1 = float(np.dot(w1[:head], prefix)) if head else 0.0
        base2 = float(np.dot(w2[:head], prefix)) if head else 0.0
        s1 = tail @ w1[head:] + base1 >= 0
        s2 = tail @ w2[head:] + base2 >= 0
        disagree += int(np.count_nonzero(s1 != s2))
    return disagree / 2**n


def distance_mc(w1, w2, n: int, samples: int, rng_seed: int = 0) -> float:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    rng = rng_for(rng_seed, "distance_mc")
    disagree = 0
    chunk = max(1, 2**20 // max(n, 1))
    left = samples
    while left:
        b = min(chunk, left)
        z = rng.choice(np.array([1.0, -1.0]), size=(b, n))
        disagree += int(np.count_nonzero((z @ w1 >= 0) != (z @ w2 >= 0)))
        left -= b
    return disagree / samples


def restricted_distance(w1, w2, C) -> float:
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] == 0:
        raise ValueError("C must be a nonempty list of vectors")
    return float(np.count_nonzero((C @ np.asarray(w1, float) >= 0) != (C @ np.asarray(w2, float) >= 0))) / C.shape[0]


def diameter_from_inner(inner: float) -> float:
    return (1.0 - inner) / 2.0


def inner_from_diameter(diameter: float) -> float:
    return 1.0 - 2.0 * diameter


def angle_distance(w1, w2) -> float:
    """Normalized angle between two weight vectors, in [0, 1]."""
    w1 = np.asarray(w1, float)
    w2 = np.asarray(w2, float)
    cos = float(w1 @ w2) / (math.sqrt(float(w1 @ w1)) * math.sqrt(float(w2 @ w2)))
    return math.acos(min(1.0, max(-1.0, cos))) / math.pi
