"""Estimators of the expected diameter and their sample-size planners.

DIR averages ``sign(w1 . z) sign(w2 . z)`` over version-space pairs and cube
probes. ALT averages the unbiased Bernoulli-variance estimate of
``(2 P_z - 1)^2`` over probes z. The Fourier estimator sums squared empirical
Fourier coefficients of the labels, and the angle estimator handles real
data.

Weight-vector pairs come in two flavours. ``pairing="chain"`` pairs
consecutive thinned samples of one chain, the literal protocol. With
``pairing="independent"`` the members come from two independent chains.
The two agree once the chain mixes within one thinning interval. When it
does not (thin version spaces in high dimension), chain pairing is biased
toward smaller diameters.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import Dataset, EstimateReport, angle_distance, cube, diameter_from_inner, signs
from .seeding import rng_for
from .version_space import ChainConfig, HitAndRun, VersionSpace, chain_seed

DEFAULT_PLANNER_C = 32.0
FOURIER_BUDGET = 2 * 10**7
# probe counts are drawn as one multinomial over the cube when it is this small
MULTINOMIAL_MAX_N = 16
PAIRINGS = ("chain", "independent")


class InfeasiblePlanError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------- planners


@dataclass(frozen=True)
class PlannerParams:
    """Accuracy ``eps`` split as ``delta + mu`` (DIR) or ``delta + 4 mu`` (ALT).

    ``rule="stated"`` evaluates the usual closed form for the DIR probe
    count; ``rule="bound"`` solves the underlying Hoeffding bound instead.
    ``log_base`` is the base of the logarithm in the ALT formula.
    """

    eps: float
    eta: float
    delta: float | None = None
    c: float = DEFAULT_PLANNER_C
    rule: str = "stated"
    log_base: float = math.e

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", self.eps / 2)
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise ValueError("eps must be positive")
        if not 0 < self.delta < self.eps:
            raise ValueError("need 0 < delta < eps")
        if not 0 < self.eta < 1:
            raise ValueError("need 0 < eta < 1")
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError("c must be positive")
        if self.rule not in ("stated", "bound"):
            raise ValueError("rule must be 'stated' or 'bound'")
        if not self.log_base > 1:
            raise ValueError("log_base must exceed 1")

    @property
    def mu(self) -> float:
        return self.eps - self.delta

    @property
    def outer_exponent(self) -> float:
        # m * delta^2 / 2 with m = c / eps^2; equals c/8 at delta = eps/2
        return self.c * self.delta**2 / (2 * self.eps**2)

    def min_c(self) -> float:
        """Smallest c for which the plan exists."""
        return 2 * self.eps**2 / self.delta**2 * math.log(2 / self.eta)

    def _ratio(self) -> float:
        ratio = (1 - self.eta / 2) / -math.expm1(-self.outer_exponent)
        if ratio >= 1:
            raise InfeasiblePlanError(
                f"no plan for eps={self.eps}, eta={self.eta}, c={self.c}: "
                f"c must exceed {self.min_c():.4g}")
        return ratio


def _count(x: float, what: str) -> int:
    if not math.isfinite(x) or x <= 0:
        raise InfeasiblePlanError(f"planned {what} is not a positive finite count ({x})")
    return math.ceil(x)


def plan_dir(p: PlannerParams) -> tuple[int, int]:
    """Pair count m and per-pair probe count l."""
    m = _count(p.c / p.eps**2, "m")
    ratio = p._ratio()
    base = 1 - ratio if p.rule == "stated" else ratio
    inner = -math.expm1(p.eps**2 / p.c * math.log(base))
    l = -(2 / p.mu**2) * math.log(inner)
    return m, _count(l, "l")


def plan_alt(p: PlannerParams) -> tuple[int, int]:
    """Probe count r and per-probe weight-sample count s (even)."""
    r = _count(p.c / p.eps**2, "r")
    arg = p.eps**2 / p.c * (1 - p._ratio())
    mu = p.mu / 4
    s = _count(-math.log(arg, p.log_base) / mu**2, "s")
    return r, s + (s % 2)


def dir_confidence(eps: float, delta: float, m: int, l: int) -> float:
    """Guaranteed Pr(|est - truth| <= eps) for DIR with m pairs and l probes."""
    mu = eps - delta
    return 2 * -math.expm1(-m * delta**2 / 2) * (-math.expm1(-l * mu**2 / 2)) ** m - 1


def alt_confidence(eps: float, delta: float, r: int, s: int) -> float:
    mu = (eps - delta) / 4
    return 2 * -math.expm1(-r * delta**2 / 2) * (1 - r * math.exp(-s * mu**2)) - 1


# ---------------------------------------------------------------- helpers


def _run_partitions(fn: Callable, tasks: Sequence, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*tasks)))


def _ranges(total: int, parts: int) -> list[tuple[int, int]]:
    bounds = np.linspace(0, total, parts + 1).astype(np.int64)
    return [(int(bounds[i]), int(bounds[i + 1])) for i in range(parts)]


def _require_boolean(d: Dataset, method: str) -> None:
    if d.space != "boolean":
        raise ValueError(f"{method} needs a boolean dataset; use the angle estimator for real data")


def _chains(space: VersionSpace, config: ChainConfig, tag: str, p: int) -> tuple[HitAndRun, HitAndRun]:
    left = HitAndRun(space, config.with_seed(chain_seed(config.seed, tag, 2 * p)))
    right = HitAndRun(space, config.with_seed(chain_seed(config.seed, tag, 2 * p + 1)))
    return left, right


class PairSource:
    """Yields (W1, W2) blocks of weight-vector pairs under a pairing rule."""

    def __init__(self, space: VersionSpace, config: ChainConfig, tag: str, p: int = 0, pairing: str = "chain"):
        if pairing not in PAIRINGS:
            raise ValueError(f"pairing must be one of {PAIRINGS}")
        self.pairing = pairing
        if pairing == "chain":
            self.chain = HitAndRun(space, config.with_seed(chain_seed(config.seed, tag, 2 * p)))
        else:
            self.left, self.right = _chains(space, config, tag, p)

    def pairs(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        if self.pairing == "chain":
            W = self.chain.sample(2 * count)
            return W[0::2], W[1::2]
        return self.left.sample(count), self.right.sample(count)

    def halves(self, half: int) -> tuple[np.ndarray, np.ndarray]:
        """Two groups of ``half`` samples (first and second half of a block under chain pairing)."""
        if self.pairing == "chain":
            W = self.chain.sample(2 * half)
            return W[:half], W[half:]
        return self.left.sample(half), self.right.sample(half)


def _random_cube_points(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    return 1.0 - 2.0 * rng.integers(0, 2, size=(count, n))


def _use_multinomial(n: int, probes: int) -> bool:
    return n <= MULTINOMIAL_MAX_N and 2**n <= probes


def _pair_agreement(W1: np.ndarray, W2: np.ndarray, probes: int, rng: np.random.Generator) -> int:
    """Sum over pairs t and ``probes`` fresh z per pair of h1(z) h2(z)."""
    n = W1.shape[1]
    if _use_multinomial(n, probes):
        pts = cube(n).astype(float)
        agree = signs(W1 @ pts.T).astype(np.int64) * signs(W2 @ pts.T)
        counts = rng.multinomial(probes, np.full(2**n, 2.0**-n), size=W1.shape[0])
        return int(np.sum(counts * agree))
    total = 0
    for w1, w2 in zip(W1, W2):
        Z = _random_cube_points(rng, probes, n)
        total += int(np.sum(signs(Z @ w1).astype(np.int64) * signs(Z @ w2)))
    return total


def _alt_disagree(WL: np.ndarray, WR: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """For each row z of Z, the count of j with w_Lj . z < 0 and w_Rj . z >= 0."""
    out = np.zeros(Z.shape[0], dtype=np.int64)
    step = max(1, 2**22 // max(1, WL.shape[0]))
    for lo in range(0, Z.shape[0], step):
        Zc = Z[lo:lo + step]
        out[lo:lo + step] = np.sum((WL @ Zc.T < 0) & (WR @ Zc.T >= 0), axis=0)
    return out


# ---------------------------------------------------------------- DIR


def _dir_partition(d: Dataset, config: ChainConfig, lo: int, hi: int, l: int, p: int, pairing: str) -> int:
    W1, W2 = PairSource(VersionSpace(d), config, "dir", p, pairing).pairs(hi - lo)
    return _pair_agreement(W1, W2, l, rng_for(config.seed, "dir_probes", p))


def estimate_dir(d: Dataset, m: int, l: int, config: ChainConfig = ChainConfig(),
                 partitions: int = 1, workers: int = 1, pairing: str = "chain") -> EstimateReport:
    """Direct estimator with m pairs and l cube probes per pair."""
    if m < 1 or l < 1:
        raise ValueError("m and l must be >= 1")
    _require_boolean(d, "DIR")
    if pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}")
    t0 = time.perf_counter()
    sums = _run_partitions(_dir_partition, [(d, config, lo, hi, l, p, pairing)
                                            for p, (lo, hi) in enumerate(_ranges(m, partitions)) if hi > lo],
                           workers)
    inner = Fraction(sum(sums), m * l)
    params = {"m": m, "l": l, "warmup": config.warmup, "thinning": config.thinning,
              "partitions": partitions, "pairing": pairing}
    return EstimateReport("dir", float(inner), diameter_from_inner(float(inner)), params, config.seed,
                          {"version_space_samples": 2 * m, "cube_probes": m * l},
                          (time.perf_counter() - t0) * 1e3)


# ---------------------------------------------------------------- ALT


def _alt_fresh_partition(d: Dataset, config: ChainConfig, lo: int, hi: int, s: int, p: int,
                         pairing: str) -> int:
    source = PairSource(VersionSpace(d), config, "alt", p, pairing)
    Z = _random_cube_points(rng_for(config.seed, "alt_probes", p), hi - lo, d.n)
    total = 0
    for z in Z:
        WL, WR = source.halves(s // 2)
        total += int(_alt_disagree(WL, WR, z[None, :])[0])
    return total


def _alt_pool_partition(d: Dataset, config: ChainConfig, lo: int, hi: int, p: int, pairing: str) -> tuple:
    return PairSource(VersionSpace(d), config, "alt_pool", p, pairing).halves(hi - lo)


def estimate_alt(d: Dataset, r: int, s: int, config: ChainConfig = ChainConfig(), shared_pool: bool = False,
                 partitions: int = 1, workers: int = 1, pairing: str = "chain") -> EstimateReport:
    """Alternative estimator with r probes and s weight samples per probe.

    By default every probe gets s fresh samples. ``shared_pool=True`` draws
    one pool of s samples and reuses it for all probes: each probe term stays
    unbiased but the terms become correlated, so the planned guarantee no
    longer applies.
    """
    if s < 2 or s % 2:
        raise ValueError("s must be a positive even number")
    if r < 1:
        raise ValueError("r must be >= 1")
    _require_boolean(d, "ALT")
    if pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}")
    t0 = time.perf_counter()
    if shared_pool:
        pools = _run_partitions(_alt_pool_partition,
                                [(d, config, lo, hi, p, pairing) for p, (lo, hi) in enumerate(_ranges(s // 2, partitions))
                                 if hi > lo], workers)
        WL = np.concatenate([a for a, _ in pools])
        WR = np.concatenate([b for _, b in pools])
        rng = rng_for(config.seed, "alt_probes", "pool")
        if _use_multinomial(d.n, r):
            pts = cube(d.n).astype(float)
            counts = rng.multinomial(r, np.full(2**d.n, 2.0**-d.n))
            total = int(counts @ _alt_disagree(WL, WR, pts))
        else:
            total = int(np.sum(_alt_disagree(WL, WR, _random_cube_points(rng, r, d.n))))
        samples = s
    else:
        sums = _run_partitions(_alt_fresh_partition,
                               [(d, config, lo, hi, s, p, pairing) for p, (lo, hi) in enumerate(_ranges(r, partitions))
                                if hi > lo], workers)
        total = sum(sums)
        samples = r * s
    # (1/r) sum_i (1 - 4 (2/s) count_i)
    inner = 1 - Fraction(8 * total, r * s)
    params = {"r": r, "s": s, "shared_pool": shared_pool, "warmup": config.warmup,
              "thinning": config.thinning, "partitions": partitions, "pairing": pairing}
    return EstimateReport("alt", float(inner), diameter_from_inner(float(inner)), params, config.seed,
                          {"version_space_samples": samples, "cube_probes": r},
                          (time.perf_counter() - t0) * 1e3)


# ---------------------------------------------------------------- Fourier


@dataclass(frozen=True)
class FourierParams:
    """Sum over subsets of size < a. ``kappa`` scales the informational b = kappa/sqrt(a)."""

    a: int
    c_of_H: float = 1.0
    kappa: float = 1.0
    budget: int = FOURIER_BUDGET

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("a must be >= 0")
        if self.c_of_H < 1:
            raise ValueError("c(H) is at least 1")
        if self.budget < 1:
            raise ValueError("budget must be positive")

    @property
    def b(self) -> float | None:
        return self.kappa / math.sqrt(self.a) if self.a > 0 else None


class BudgetExceededError(ValueError):
    pass


def _character_sum(d: Dataset, S) -> int:
    S = list(S)
    chi = np.prod(d.X[:, S], axis=1) if S else np.ones(d.k)
    return int(np.rint(chi @ d.y))


def fourier_ell(d: Dataset, S) -> float:
    """Empirical Fourier coefficient (1/k) sum_i chi_S(x_i) y_i; S holds 0-based indices."""
    if d.k == 0:
        raise ValueError("empty dataset")
    S = sorted(set(int(j) for j in S))
    if S and not (0 <= S[0] and S[-1] < d.n):
        raise ValueError(f"subset indices must lie in [0, {d.n})")
    if d.space == "boolean":
        return _character_sum(d, S) / d.k
    chi = np.prod(d.X[:, S], axis=1) if S else np.ones(d.k)
    return float(chi @ d.y) / d.k


def _subset_count(n: int, a: int) -> int:
    return sum(math.comb(n, s) for s in range(min(a, n + 1)))


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform of a length-2^n integer vector."""
    h = np.array(values, dtype=np.int64)
    size = h.shape[0]
    step = 1
    while step < size:
        h = h.reshape(-1, 2, step)
        h = np.stack((h[:, 0] + h[:, 1], h[:, 0] - h[:, 1]), axis=1).reshape(size)
        step *= 2
    return h


def _popcount(values: np.ndarray) -> np.ndarray:
    out = np.zeros(values.shape, dtype=np.int64)
    v = values.astype(np.int64)
    while np.any(v):
        out += v & 1
        v >>= 1
    return out


def fourier_numerators(d: Dataset, a: int, route: str = "auto", budget: int = FOURIER_BUDGET) -> dict:
    """Map from subset (sorted tuple) to k * ell(S), for every |S| < a."""
    count = _subset_count(d.n, a)
    if count > budget:
        raise BudgetExceededError(f"{count} subsets of size < {a} exceed the budget {budget}")
    if route == "auto":
        route = "wht" if d.n <= 20 else "enumerate"
    if route == "wht":
        # index bit (n-1-j) set <=> x_j = -1, matching the cube order
        bits = (d.X < 0).astype(np.int64)
        idx = bits @ (1 << np.arange(d.n - 1, -1, -1, dtype=np.int64)) if d.n else np.zeros(d.k, np.int64)
        g = np.zeros(2**d.n, dtype=np.int64)
        np.add.at(g, idx, d.y)
        H = walsh_hadamard(g)
        masks = np.arange(2**d.n, dtype=np.int64)
        keep = masks[_popcount(masks) < a]
        out = {}
        for mask in keep:
            S = tuple(j for j in range(d.n) if mask >> (d.n - 1 - j) & 1)
            out[S] = int(H[mask])
        return out
    if route != "enumerate":
        raise ValueError(f"unknown route {route!r}")
    return {S: _character_sum(d, S) for size in range(min(a, d.n + 1))
            for S in itertools.combinations(range(d.n), size)}


def estimate_fourier(d: Dataset, p: FourierParams, route: str = "auto") -> EstimateReport:
    """inner = sum_{|S| < a} ell(S)^2, accumulated exactly."""
    _require_boolean(d, "the Fourier estimator")
    if d.k == 0:
        raise ValueError("empty dataset")
    if p.a > d.n + 1:
        raise ValueError(f"a must be at most n + 1 = {d.n + 1}")
    t0 = time.perf_counter()
    nums = fourier_numerators(d, p.a, route, p.budget)
    inner = Fraction(sum(v * v for v in nums.values()), d.k * d.k)
    b = p.b
    params = {"a": p.a, "c_of_H": p.c_of_H, "kappa": p.kappa, "b": b,
              "bias_bound": None if b is None else b * p.c_of_H,
              "note": "sum over |S| < a omits the tail mass on |S| >= a, at most b * c(H); informational",
              "inner_exact": f"{inner.numerator}/{inner.denominator}"}
    return EstimateReport("fourier", float(inner), diameter_from_inner(float(inner)), params, 0,
                          {"subsets": len(nums)}, (time.perf_counter() - t0) * 1e3)


# ---------------------------------------------------------------- angle

ZERO_NORM_RETRIES = 100


def estimate_angle(d: Dataset, t: int, config: ChainConfig = ChainConfig(),
                   pairing: str = "chain") -> EstimateReport:
    """Mean normalized angle between t pairs of version-space samples (real data).

    A pair with a zero-norm member is redrawn, at most ZERO_NORM_RETRIES times per pair.
    """
    if d.space != "real":
        raise ValueError("the angle estimator needs a real-mode dataset")
    if t < 1:
        raise ValueError("t must be >= 1")
    t0 = time.perf_counter()
    source = PairSource(VersionSpace(d), config, "angle", 0, pairing)
    W1, W2 = source.pairs(t)
    redrawn = 0
    for i in range(t):
        tries = 0
        while not (np.any(W1[i]) and np.any(W2[i])):
            tries += 1
            if tries > ZERO_NORM_RETRIES:
                raise RuntimeError("repeated zero-norm version-space samples")
            a, b = source.pairs(1)
            W1[i], W2[i] = a[0], b[0]
            redrawn += 1
    diameter = math.fsum(angle_distance(a, b) for a, b in zip(W1, W2)) / t
    params = {"t": t, "warmup": config.warmup, "thinning": config.thinning, "pairing": pairing}
    return EstimateReport("angle", None, diameter, params, config.seed,
                          {"version_space_samples": 2 * (t + redrawn)}, (time.perf_counter() - t0) * 1e3)


# ---------------------------------------------------------------- Bernoulli


def bern_sol1(samples) -> float:
    """(2 mean - 1)^2: the plug-in estimate of (2p - 1)^2."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("no samples")
    return (2.0 * float(np.mean(x)) - 1.0) ** 2


def bern_sol2(samples) -> float:
    """Unbiased estimate of (2p - 1)^2 from two independent halves."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0 or x.size % 2:
        raise ValueError("need a nonempty even number of samples")
    half = x.size // 2
    return -4.0 * (2.0 / x.size) * float(np.sum((1.0 - x[:half]) * x[half:])) + 1.0


# ---------------------------------------------------------------- convergence


class Stepper:
    """Incremental estimator: ``step()`` runs one batch and returns the running diameter."""

    method = "dir"

    def step(self) -> float:
        raise NotImplementedError

    def report(self, batches: int, converged: bool) -> EstimateReport:
        raise NotImplementedError


class DirStepper(Stepper):
    method = "dir"

    def __init__(self, d: Dataset, pairs_per_batch: int = 10, probes: int = 200,
                 config: ChainConfig = ChainConfig(), pairing: str = "chain"):
        _require_boolean(d, "DIR")
        if pairs_per_batch < 1 or probes < 1:
            raise ValueError("batch sizes must be >= 1")
        self.d, self.pairs, self.probes, self.config = d, pairs_per_batch, probes, config
        self.source = PairSource(VersionSpace(d), config, "dir_adaptive", 0, pairing)
        self.rng = rng_for(config.seed, "dir_adaptive_probes")
        self.total = 0
        self.count = 0
        self.t0 = time.perf_counter()

    def step(self) -> float:
        W1, W2 = self.source.pairs(self.pairs)
        self.total += _pair_agreement(W1, W2, self.probes, self.rng)
        self.count += self.pairs * self.probes
        return diameter_from_inner(self.total / self.count)

    def report(self, batches: int, converged: bool) -> EstimateReport:
        inner = self.total / self.count
        pairs = batches * self.pairs
        return EstimateReport("dir", inner, diameter_from_inner(inner),
                              {"m": pairs, "l": self.probes, "batches": batches, "converged": converged,
                               "pairing": self.source.pairing,
                               "warmup": self.config.warmup, "thinning": self.config.thinning},
                              self.config.seed, {"version_space_samples": 2 * pairs, "cube_probes": self.count},
                              (time.perf_counter() - self.t0) * 1e3)


class AltStepper(Stepper):
    method = "alt"

    def __init__(self, d: Dataset, probes_per_batch: int = 10, s: int = 20,
                 config: ChainConfig = ChainConfig(), pairing: str = "chain"):
        _require_boolean(d, "ALT")
        if s < 2 or s % 2 or probes_per_batch < 1:
            raise ValueError("need probes_per_batch >= 1 and even s >= 2")
        self.d, self.probes, self.s, self.config = d, probes_per_batch, s, config
        self.source = PairSource(VersionSpace(d), config, "alt_adaptive", 0, pairing)
        self.rng = rng_for(config.seed, "alt_adaptive_probes")
        self.total = 0
        self.r = 0
        self.t0 = time.perf_counter()

    def step(self) -> float:
        Z = _random_cube_points(self.rng, self.probes, self.d.n)
        for z in Z:
            WL, WR = self.source.halves(self.s // 2)
            self.total += int(_alt_disagree(WL, WR, z[None, :])[0])
        self.r += self.probes
        return diameter_from_inner(self._inner())

    def _inner(self) -> float:
        return float(1 - Fraction(8 * self.total, self.r * self.s))

    def report(self, batches: int, converged: bool) -> EstimateReport:
        inner = self._inner()
        return EstimateReport("alt", inner, diameter_from_inner(inner),
                              {"r": self.r, "s": self.s, "batches": batches, "converged": converged,
                               "pairing": self.source.pairing,
                               "warmup": self.config.warmup, "thinning": self.config.thinning},
                              self.config.seed, {"version_space_samples": self.r * self.s, "cube_probes": self.r},
                              (time.perf_counter() - self.t0) * 1e3)


def run_until_converged(stepper: Stepper, window: int = 10, tol: float = 0.05,
                        max_batches: int = 10**4) -> EstimateReport:
    """Run batches until the last ``window`` running estimates span at most ``tol``."""
    if window < 1 or tol < 0 or max_batches < 1:
        raise ValueError("need window >= 1, tol >= 0 and max_batches >= 1")
    history: list[float] = []
    for batch in range(1, max_batches + 1):
        history.append(stepper.step())
        recent = history[-window:]
        if len(recent) == window and max(recent) - min(recent) <= tol:
            return stepper.report(batch, True)
    raise ConvergenceError(f"no convergence within {max_batches} batches")
