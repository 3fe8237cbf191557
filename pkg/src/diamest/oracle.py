"""Ground truth at desk scale.

``enumerate_consistent`` lists every truth table on {+1,-1}^n (n <= 4) that
agrees with the dataset and has a strict homogeneous separator, deciding
separability exactly with rational Fourier-Motzkin elimination.
``oracle_uni`` then gives the uniform-distribution expected diameter as an
exact fraction, and ``oracle_vol`` is a heavy Hit-and-Run reference for the
volume distribution.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Dataset, EstimateReport, NonSeparableError, cube, diameter_from_inner, signs
from .fme import feasible
from .version_space import ChainConfig, HitAndRun, VersionSpace, chain_seed

MAX_ORACLE_N = 4


@dataclass(frozen=True)
class HypothesisTable:
    """Values on the cube points, in the order of :func:`diamest.core.cube`."""

    truth_table: tuple

    @property
    def n(self) -> int:
        return len(self.truth_table).bit_length() - 1

    def __call__(self, x) -> int:
        idx = 0
        for v in x:
            idx = 2 * idx + (1 if v == -1 else 0)
        return self.truth_table[idx]

    def as_array(self) -> np.ndarray:
        return np.array(self.truth_table, dtype=np.int8)


def _point_index(x) -> int:
    idx = 0
    for v in x:
        idx = 2 * idx + (1 if v < 0 else 0)
    return idx


def _forced_labels(d: Dataset) -> dict[int, int]:
    forced: dict[int, int] = {}
    for x, y in zip(d.X, d.y):
        idx = _point_index(x)
        if forced.get(idx, y) != y:
            raise NonSeparableError("the same point carries both labels")
        forced[idx] = int(y)
    return forced


def enumerate_consistent(d: Dataset, strict: bool = True) -> list[HypothesisTable]:
    """All consistent truth tables, in lexicographic order.

    With ``strict=False`` the class is widened to tables of the form
    ``sign(w . x)`` under sign(0) = +1 for any w, including boundary-only
    patterns such as the constant +1 from ``w = 0``.
    """
    n = d.n
    if n > MAX_ORACLE_N:
        raise ValueError(f"exact enumeration supports n <= {MAX_ORACLE_N}, got n={n}")
    if d.space != "boolean":
        raise ValueError("enumeration needs a boolean dataset")
    try:
        forced = _forced_labels(d)
    except NonSeparableError:
        return []
    pts = cube(n)
    size = 2**n
    half = size // 2
    # representatives x (first coordinate +1) of the antipodal pairs {x, -x}
    reps = [tuple(Fraction(int(v)) for v in pts[i]) for i in range(half)]

    def options(i):
        a, b = forced.get(i), forced.get(size - 1 - i)
        if strict:
            choices = [(1, -1), (-1, 1)]
        else:
            choices = [(1, -1), (-1, 1), (1, 1)]
        return [c for c in choices if (a is None or c[0] == a) and (b is None or c[1] == b)]

    def rows_for(i, choice):
        x = reps[i]
        neg = tuple(-v for v in x)
        if choice == (1, -1):
            return [(x, 1)]
        if choice == (-1, 1):
            return [(neg, 1)]
        return [(x, 0), (neg, 0)]

    found: list[HypothesisTable] = []

    def extend(i, rows, table):
        if i == half:
            found.append(HypothesisTable(tuple(table)))
            return
        for choice in options(i):
            new_rows = rows + rows_for(i, choice)
            if feasible(new_rows):
                table[i], table[size - 1 - i] = choice
                extend(i + 1, new_rows, table)
        table[i] = table[size - 1 - i] = 0

    extend(0, [], [0] * size)
    found.sort(key=lambda h: tuple(-v for v in h.truth_table))
    return found


def _positive_counts(tables: list[HypothesisTable]) -> np.ndarray:
    T = np.array([h.truth_table for h in tables], dtype=np.int64)
    return (T == 1).sum(axis=0)


def restricted_expected_distance_uni(tables: list[HypothesisTable], C) -> Fraction:
    """Exact uniform-distribution expectation of the C-restricted distance."""
    C = np.asarray(C)
    if C.ndim != 2 or C.shape[0] == 0:
        raise ValueError("C must be a nonempty list of points")
    if not tables:
        raise NonSeparableError("no consistent hypotheses")
    plus = _positive_counts(tables)
    h = len(tables)
    # pairs (h1, h2) disagreeing at x: 2 * P_x * (|H| - P_x)
    total = sum(2 * int(plus[_point_index(c)]) * (h - int(plus[_point_index(c)])) for c in C)
    return Fraction(total, h * h * C.shape[0])


def expected_diameter_uni(tables: list[HypothesisTable]) -> Fraction:
    if not tables:
        raise NonSeparableError("no consistent hypotheses")
    return restricted_expected_distance_uni(tables, cube(tables[0].n))


def oracle_uni(d: Dataset, count_weak: bool = True) -> EstimateReport:
    t0 = time.perf_counter()
    tables = enumerate_consistent(d)
    if not tables:
        raise NonSeparableError("no consistent strict halfspace: contradictory labels")
    exact = expected_diameter_uni(tables)
    params = {
        "distribution": "uni",
        "n": d.n,
        "k": d.k,
        "diameter_exact": f"{exact.numerator}/{exact.denominator}",
        "hypothesis_count": len(tables),
        "c_of_H": 1,
    }
    if count_weak:
        params["weak_hypothesis_count"] = len(enumerate_consistent(d, strict=False))
    inner = 1 - 2 * exact
    return EstimateReport("oracle_uni", float(inner), diameter_from_inner(float(inner)), params, 0,
                          {"hypotheses": len(tables)}, (time.perf_counter() - t0) * 1e3)


def oracle_vol(d: Dataset, heavy_samples: int = 100_000, config: ChainConfig = ChainConfig(),
               partitions: int = 1) -> EstimateReport:
    """Reference value under the volume distribution.

    Draws ``heavy_samples`` pairs of version-space samples, one member from
    each of two independent chains, and averages the exact cube distance of
    each pair. Each of the ``partitions`` chain pairs covers a contiguous
    range of pair indices.
    """
    if d.n > 16:
        raise ValueError("oracle_vol computes exact distances; keep n <= 16")
    t0 = time.perf_counter()
    space = VersionSpace(d)
    pts = cube(d.n).astype(float)
    dists = np.empty(heavy_samples)
    bounds = np.linspace(0, heavy_samples, partitions + 1).astype(int)
    for p in range(partitions):
        lo, hi = bounds[p], bounds[p + 1]
        if hi == lo:
            continue
        left = HitAndRun(space, config.with_seed(chain_seed(config.seed, "oracle_vol", 2 * p)))
        right = HitAndRun(space, config.with_seed(chain_seed(config.seed, "oracle_vol", 2 * p + 1)))
        T1 = signs(left.sample(hi - lo) @ pts.T)
        T2 = signs(right.sample(hi - lo) @ pts.T)
        dists[lo:hi] = (T1 != T2).mean(axis=1)
    mean = math.fsum(dists) / heavy_samples
    se = float(np.std(dists, ddof=1) / math.sqrt(heavy_samples)) if heavy_samples > 1 else float("nan")
    inner = 1.0 - 2.0 * mean
    params = {"distribution": "vol", "n": d.n, "k": d.k, "pairs": heavy_samples, "standard_error": se,
              "warmup": config.warmup, "thinning": config.thinning, "partitions": partitions,
              "reference": True}
    return EstimateReport("oracle_vol", inner, (1.0 - inner) / 2.0, params, config.seed,
                          {"version_space_samples": 2 * heavy_samples},
                          (time.perf_counter() - t0) * 1e3)
