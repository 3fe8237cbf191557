"""Run the bad / arbitrary / good study and print the per-kind summary.

    python scripts/bag_study.py                      # desk scale, n=20 k=12
    python scripts/bag_study.py --n 50 --k 20 --reps 100 --out bag50.csv
"""
import argparse
import sys
from pathlib import Path

from diamest.experiments import KINDS, BagConfig, bag_experiment
from diamest.seeding import DEFAULT_SEED
from diamest.version_space import ChainConfig


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--k", type=int, default=12)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--estimator", choices=("dir", "alt"), default="dir")
    p.add_argument("--pairing", choices=("chain", "independent"), default="chain")
    p.add_argument("--warmup", type=int, default=100_000)
    p.add_argument("--thinning", type=int, default=500)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path)
    args = p.parse_args(argv)

    cfg = BagConfig(n=args.n, k=args.k, reps_per_kind=args.reps, estimator=args.estimator,
                    master_seed=args.seed, chain=ChainConfig(args.warmup, args.thinning),
                    pairing=args.pairing, workers=args.workers)
    result = bag_experiment(cfg)
    if args.out:
        args.out.write_text(result.to_csv(timing=True))
        args.out.with_name(args.out.stem + ".summary.json").write_text(result.summary_json() + "\n")

    print(f"{'kind':<10} {'diameter':>18} {'accuracy':>18}")
    for kind in KINDS:
        s = result.summary[kind]
        print(f"{kind:<10} {s['diameter']['mean']:>9.4f} +- {s['diameter']['std']:.4f}"
              f" {s['accuracy']['mean']:>9.4f} +- {s['accuracy']['std']:.4f}")
    print(f"spearman(kind means) = {result.summary['spearman_kind_means']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
