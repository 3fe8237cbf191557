"""Bad / arbitrary / good dataset study.

Each kind of dataset is labeled by a standard Gaussian ``true_w``:

* arbitrary: k uniform cube points;
* bad: k/2 uniform points together with their negations;
* good: k/2 boundary pairs at Hamming distance 1 with different labels.

For every dataset the study records the expected diameter (adaptive DIR or
ALT) and the distance between a Hit-and-Run draw and a perceptron output.
"""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import spearmanr

from .core import Dataset, distance_exact, distance_mc
from .estimators import AltStepper, DirStepper, run_until_converged
from .perceptron import perceptron
from .seeding import DEFAULT_SEED, derive, rng_for
from .version_space import ChainConfig, HitAndRun, chain_seed

__all__ = ["GeneratedDataset", "StudyRow", "BagConfig", "BagResult", "gen_arbitrary", "gen_bad", "gen_good",
           "generate", "perceptron", "accuracy_experiment", "bag_experiment", "KINDS"]

KINDS = ("bad", "arbitrary", "good")
FLIP_SEARCH_CAP = 10**4
EXACT_DISTANCE_MAX_N = 12
_REDRAW_CAP = 10**4


@dataclass
class GeneratedDataset:
    dataset: Dataset
    true_w: np.ndarray
    kind: str
    seed: int

    def sidecar(self) -> dict:
        return {"true_w": [float(c) for c in self.true_w], "kind": self.kind, "seed": int(self.seed)}


def _true_w(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n)


def _draw_point(rng: np.random.Generator, w: np.ndarray) -> np.ndarray:
    # points on the hyperplane of true_w are redrawn so every label is unambiguous
    for _ in range(_REDRAW_CAP):
        x = 1.0 - 2.0 * rng.integers(0, 2, size=w.shape[0])
        if x @ w != 0:
            return x
    raise RuntimeError("true_w vanishes on every drawn point")


def _labeled(points: list, w: np.ndarray, n: int) -> Dataset:
    X = np.array(points, dtype=float).reshape(len(points), n)
    return Dataset(X, np.where(X @ w >= 0, 1, -1), n)


def _check_size(n: int, k: int, even: bool) -> None:
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    if even and k % 2:
        raise ValueError("k must be even")


def gen_arbitrary(n: int, k: int, seed: int = DEFAULT_SEED) -> GeneratedDataset:
    _check_size(n, k, False)
    rng = rng_for(seed, "gen", "arbitrary")
    w = _true_w(rng, n)
    pts = [_draw_point(rng, w) for _ in range(k)]
    return GeneratedDataset(_labeled(pts, w, n), w, "arbitrary", seed)


def gen_bad(n: int, k: int, seed: int = DEFAULT_SEED) -> GeneratedDataset:
    """k/2 distinct antipodal pairs {x, -x}."""
    _check_size(n, k, True)
    if k // 2 > 2 ** (n - 1):
        raise ValueError(f"only {2 ** (n - 1)} antipodal pairs exist in dimension {n}")
    rng = rng_for(seed, "gen", "bad")
    w = _true_w(rng, n)
    seen: set = set()
    pts = []
    while len(pts) < k:
        x = _draw_point(rng, w)
        key = tuple(x) if x[0] > 0 else tuple(-x)
        if key in seen:
            continue
        seen.add(key)
        pts += [x, -x]
    return GeneratedDataset(_labeled(pts, w, n), w, "bad", seed)


def gen_good(n: int, k: int, seed: int = DEFAULT_SEED, cap: int = FLIP_SEARCH_CAP) -> GeneratedDataset:
    """k/2 boundary pairs found by a flip scan.

    Draw x, then try single-coordinate flips in a random order; the first
    flip that changes the label of true_w gives the pair. A draw with no such
    flip is discarded, and ``cap`` discarded draws for one pair is an error.
    """
    _check_size(n, k, True)
    rng = rng_for(seed, "gen", "good")
    w = _true_w(rng, n)
    pts = []
    for _ in range(k // 2):
        for _ in range(cap):
            x = _draw_point(rng, w)
            hx = x @ w >= 0
            found = None
            for j in rng.permutation(n):
                y = x.copy()
                y[j] = -y[j]
                if y @ w != 0 and (y @ w >= 0) != hx:
                    found = y
                    break
            if found is not None:
                pts += [x, found]
                break
        else:
            raise RuntimeError(f"no boundary pair found in {cap} draws")
    return GeneratedDataset(_labeled(pts, w, n), w, "good", seed)


GENERATORS = {"bad": gen_bad, "arbitrary": gen_arbitrary, "good": gen_good}


def generate(kind: str, n: int, k: int, seed: int = DEFAULT_SEED) -> GeneratedDataset:
    if kind not in GENERATORS:
        raise ValueError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    return GENERATORS[kind](n, k, seed)


# ---------------------------------------------------------------- accuracy


@dataclass
class AccuracyResult:
    distance: float
    true_w_distance: float
    f: np.ndarray
    g: np.ndarray


def _distance(a, b, n: int, samples: int, seed: int) -> float:
    if n <= EXACT_DISTANCE_MAX_N:
        return distance_exact(a, b, n)
    return distance_mc(a, b, n, samples, seed)


def accuracy_experiment(gd: GeneratedDataset, config: ChainConfig = ChainConfig(),
                        dist_samples: int = 10**5) -> AccuracyResult:
    """Distance between a Hit-and-Run draw f and a perceptron output g.

    The distance from g to the generating ``true_w`` is kept alongside.
    """
    d = gd.dataset
    chain = HitAndRun(d, config.with_seed(chain_seed(config.seed, "accuracy")))
    f = chain.sample(1)[0]
    g = perceptron(d, derive(config.seed, "accuracy", "perceptron"))
    seed = derive(config.seed, "accuracy", "distance")
    return AccuracyResult(_distance(f, g, d.n, dist_samples, seed),
                          _distance(gd.true_w, g, d.n, dist_samples, seed), f, g)


# ---------------------------------------------------------------- study


@dataclass
class StudyRow:
    kind: str
    rep: int
    seed: int
    diameter: float
    accuracy: float
    batches: int
    duration_ms: float | None = None
    true_w_accuracy: float | None = None

    CSV_FIELDS = ("kind", "rep", "seed", "diameter", "accuracy", "batches", "duration_ms")


@dataclass(frozen=True)
class BagConfig:
    n: int = 20
    k: int = 12
    reps_per_kind: int = 20
    estimator: str = "dir"
    master_seed: int = DEFAULT_SEED
    chain: ChainConfig = ChainConfig()
    window: int = 10
    tol: float = 0.05
    max_batches: int = 10**4
    batch_pairs: int = 10
    batch_probes: int = 200
    alt_s: int = 20
    pairing: str = "chain"
    dist_samples: int = 10**5
    workers: int = 1

    def __post_init__(self):
        if self.estimator not in ("dir", "alt"):
            raise ValueError("estimator must be 'dir' or 'alt'")
        if self.reps_per_kind < 1:
            raise ValueError("reps_per_kind must be >= 1")


@dataclass
class BagResult:
    rows: list
    summary: dict = field(default_factory=dict)

    def to_csv(self, timing: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(StudyRow.CSV_FIELDS)
        for r in self.rows:
            writer.writerow([r.kind, r.rep, r.seed, repr(r.diameter), repr(r.accuracy), r.batches,
                             "" if not timing or r.duration_ms is None else f"{r.duration_ms:.3f}"])
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=True)


def _one(cfg: BagConfig, kind: str, rep: int) -> StudyRow:
    seed = cfg.master_seed + rep
    t0 = time.perf_counter()
    gd = generate(kind, cfg.n, cfg.k, seed)
    chain = cfg.chain.with_seed(derive(seed, kind, "estimate"))
    if cfg.estimator == "dir":
        stepper = DirStepper(gd.dataset, cfg.batch_pairs, cfg.batch_probes, chain, cfg.pairing)
    else:
        stepper = AltStepper(gd.dataset, cfg.batch_probes, cfg.alt_s, chain, cfg.pairing)
    report = run_until_converged(stepper, cfg.window, cfg.tol, cfg.max_batches)
    acc = accuracy_experiment(gd, cfg.chain.with_seed(derive(seed, kind, "accuracy")), cfg.dist_samples)
    return StudyRow(kind, rep, seed, report.diameter, acc.distance, report.params["batches"],
                    (time.perf_counter() - t0) * 1e3, acc.true_w_distance)


def _stats(values: list[float]) -> dict:
    return {"mean": math.fsum(values) / len(values),
            "std": statistics.stdev(values) if len(values) > 1 else 0.0,
            "count": len(values)}


def summarize(rows: list[StudyRow]) -> dict:
    out: dict = {}
    for kind in KINDS:
        sel = [r for r in rows if r.kind == kind]
        if sel:
            out[kind] = {"diameter": _stats([r.diameter for r in sel]),
                         "accuracy": _stats([r.accuracy for r in sel])}
    kinds = [k for k in KINDS if k in out]
    if len(kinds) >= 2:
        rho = spearmanr([out[k]["diameter"]["mean"] for k in kinds],
                        [out[k]["accuracy"]["mean"] for k in kinds]).statistic
        out["spearman_kind_means"] = None if math.isnan(rho) else float(rho)
    return out


def bag_experiment(cfg: BagConfig = BagConfig()) -> BagResult:
    """Run the study; rep r of every kind uses seed ``master_seed + r``."""
    tasks = [(cfg, kind, rep) for kind in KINDS for rep in range(cfg.reps_per_kind)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_one, *zip(*tasks)))
    else:
        rows = [_one(*t) for t in tasks]
    return BagResult(rows, summarize(rows))


def rows_as_dicts(rows: list[StudyRow]) -> list[dict]:
    return [asdict(r) for r in rows]
