"""Compare DIR and ALT against the heavy-sampling reference on small random data.

For each planned (eps, eta) the script reports how often each estimator lands
within eps of oracle_vol, and how long it took.
"""
import argparse
import sys
import time

import numpy as np

from diamest.core import Dataset
from diamest.estimators import PlannerParams, estimate_alt, estimate_dir, plan_alt, plan_dir
from diamest.oracle import oracle_vol
from diamest.version_space import ChainConfig


def random_dataset(n, k, seed):
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(n)
    X = 1.0 - 2.0 * rng.integers(0, 2, size=(k, n))
    return Dataset(X, np.where(X @ w >= 0, 1, -1), n)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--eps", type=float, nargs="+", default=[0.2, 0.1])
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--pairing", choices=("chain", "independent"), default="chain")
    p.add_argument("--warmup", type=int, default=10_000)
    p.add_argument("--thinning", type=int, default=25)
    args = p.parse_args(argv)
    chain = ChainConfig(args.warmup, args.thinning)

    refs = []
    for i in range(args.runs):
        d = random_dataset(2 + i % (args.max_n - 1), 1 + i % 6, i)
        refs.append((d, oracle_vol(d, 50_000, chain.with_seed(i)).diameter))

    print(f"{'eps':>6} {'m/r':>7} {'l':>7} {'s':>8} {'DIR hits':>9} {'ALT hits':>9} {'DIR s':>7} {'ALT s':>7}")
    for eps in args.eps:
        params = PlannerParams(eps, args.eta)
        m, l = plan_dir(params)
        r, s = plan_alt(params)
        hits = [0, 0]
        secs = [0.0, 0.0]
        for i, (d, ref) in enumerate(refs):
            t0 = time.perf_counter()
            hits[0] += abs(estimate_dir(d, m, l, chain.with_seed(1000 + i), pairing=args.pairing).diameter
                           - ref) <= eps
            t1 = time.perf_counter()
            hits[1] += abs(estimate_alt(d, r, s, chain.with_seed(2000 + i), shared_pool=True,
                                        pairing=args.pairing).diameter - ref) <= eps
            secs[0] += t1 - t0
            secs[1] += time.perf_counter() - t1
        print(f"{eps:>6} {m:>7} {l:>7} {s:>8} {hits[0]:>5}/{len(refs):<3} {hits[1]:>5}/{len(refs):<3}"
              f" {secs[0]:>7.1f} {secs[1]:>7.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
