"""Command line interface.

Seeds: the master ``--seed`` feeds each command through
``derive(seed, command, ...)``; ``gen`` and ``experiment`` use it directly
as the generator / master seed. Output is byte-identical for identical
flags unless ``--timing`` is given.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

from . import dataio
from .core import DimensionError, NonSeparableError
from .dataio import DataFormatError
from .estimators import (AltStepper, DirStepper, FourierParams, InfeasiblePlanError, PlannerParams,
                         estimate_alt, estimate_angle, estimate_dir, estimate_fourier, plan_alt, plan_dir,
                         run_until_converged)
from .experiments import KINDS, BagConfig, bag_experiment, generate
from .oracle import oracle_uni, oracle_vol
from .seeding import DEFAULT_SEED, derive
from .structure import TruncationParams, detect_subcube, orbit_representatives, structured_diameter
from .version_space import ChainConfig, DegenerateChordError, HitAndRun, chain_seed

log = logging.getLogger("diamest")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="master seed (default 0xDA7A)")
    p.add_argument("--workers", type=_positive, default=1, help="partition count (default 1)")
    p.add_argument("--out", type=Path, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--timing", action="store_true", help="report wall time (breaks byte identity)")


def _chain_flags(p: argparse.ArgumentParser, warmup: int = 100_000, thinning: int = 500) -> None:
    p.add_argument("--warmup", type=int, default=warmup)
    p.add_argument("--thinning", type=_positive, default=thinning)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diamest", description="Expected-diameter estimation for labeled Boolean data.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("gen", help="generate a bad / arbitrary / good dataset")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=_positive, required=True)
    g.add_argument("--k", type=int, required=True)
    _shared(g)

    e = sub.add_parser("estimate", help="estimate the expected diameter of a dataset file")
    e.add_argument("--method", choices=("dir", "alt", "fourier", "angle"), required=True)
    e.add_argument("--input", type=Path, required=True)
    e.add_argument("--eps", type=float)
    e.add_argument("--eta", type=float)
    e.add_argument("--delta", type=float)
    e.add_argument("--c", type=float, default=None, help="planner constant (default 32)")
    e.add_argument("--rule", choices=("stated", "bound"), default="stated")
    e.add_argument("--log-base", type=float, default=None, help="logarithm base in the ALT planner (default e)")
    e.add_argument("--m", type=_positive)
    e.add_argument("--l", type=_positive)
    e.add_argument("--r", type=_positive)
    e.add_argument("--s", type=_positive)
    e.add_argument("--t", type=_positive, help="pair count for the angle method")
    e.add_argument("--a", type=int, help="Fourier degree cutoff")
    e.add_argument("--kappa", type=float, default=1.0)
    e.add_argument("--c-of-h", type=float, default=1.0)
    e.add_argument("--shared-pool", action="store_true", help="ALT: reuse one weight pool for all probes")
    e.add_argument("--pairing", choices=("chain", "independent"), default="chain")
    e.add_argument("--adaptive", action="store_true", help="run batches until convergence")
    e.add_argument("--window", type=_positive, default=10)
    e.add_argument("--tol", type=float, default=0.05)
    e.add_argument("--max-batches", type=_positive, default=10**4)
    e.add_argument("--batch-pairs", type=_positive, default=10)
    e.add_argument("--batch-probes", type=_positive, default=200)
    e.add_argument("--dump-samples", type=Path, help="also write version-space samples as JSONL")
    e.add_argument("--dump-count", type=_positive, default=100)
    _chain_flags(e)
    _shared(e)

    o = sub.add_parser("oracle", help="exact (uni) or heavy-sampling (vol) reference value")
    o.add_argument("--input", type=Path, required=True)
    o.add_argument("--dist", choices=("uni", "vol"), required=True)
    o.add_argument("--heavy-samples", type=_positive, default=100_000)
    _chain_flags(o)
    _shared(o)

    s = sub.add_parser("structure", help="subcube structure tools")
    ssub = s.add_subparsers(dest="action", parser_class=_Parser)
    ssub.required = True
    so = ssub.add_parser("orbits", help="print the orbit table of a subcube dataset")
    so.add_argument("--input", type=Path, required=True)
    _shared(so)
    se = ssub.add_parser("estimate", help="orbit-sum diameter estimate")
    se.add_argument("--input", type=Path, required=True)
    mode = se.add_mutually_exclusive_group(required=True)
    mode.add_argument("--trunc-c", type=float)
    mode.add_argument("--full", action="store_true")
    se.add_argument("--pairs", type=_positive, default=10_000)
    _chain_flags(se)
    _shared(se)

    x = sub.add_parser("experiment", help="reproduction studies")
    xsub = x.add_subparsers(dest="action", parser_class=_Parser)
    xsub.required = True
    b = xsub.add_parser("bag", help="bad / arbitrary / good study")
    b.add_argument("--n", type=_positive, default=20)
    b.add_argument("--k", type=int, default=12)
    b.add_argument("--reps", type=_positive, default=20)
    b.add_argument("--estimator", choices=("dir", "alt"), default="dir")
    b.add_argument("--pairing", choices=("chain", "independent"), default="chain")
    b.add_argument("--window", type=_positive, default=10)
    b.add_argument("--tol", type=float, default=0.05)
    b.add_argument("--dist-samples", type=_positive, default=10**5)
    _chain_flags(b)
    _shared(b)
    return parser


# ---------------------------------------------------------------- output


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv_rows(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _report_csv(report: dict) -> str:
    flat = {k: v for k, v in report.items() if k not in ("params", "samples_used")}
    flat.update({f"params.{k}": json.dumps(v) if isinstance(v, (dict, list)) else v
                 for k, v in report["params"].items()})
    flat.update({f"samples_used.{k}": v for k, v in report["samples_used"].items()})
    return _csv_rows(list(flat), [["" if v is None else v for v in flat.values()]])


def _emit_report(report: dict, args) -> None:
    _emit(_report_csv(report) if args.format == "csv" else _json(report), args.out)


def _chain(args, *key) -> ChainConfig:
    return ChainConfig(args.warmup, args.thinning, derive(args.seed, *key))


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> None:
    if args.k < 0:
        raise UsageError("--k must be >= 0")
    if args.kind in ("bad", "good") and args.k % 2:
        raise UsageError(f"--kind {args.kind} needs an even --k")
    if args.out is None:
        raise UsageError("gen needs --out (the sidecar is written next to it)")
    try:
        gd = generate(args.kind, args.n, args.k, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dataio.dump(gd.dataset, args.out)
    sidecar = args.out.with_name(args.out.stem + ".meta.json")
    sidecar.write_text(_json(gd.sidecar()))
    log.info("wrote %s and %s", args.out, sidecar)


def _plan(args, planner):
    if args.eps is None or args.eta is None:
        return None
    kwargs = {"delta": args.delta, "rule": args.rule}
    if args.c is not None:
        kwargs["c"] = args.c
    if args.log_base is not None:
        kwargs["log_base"] = args.log_base
    try:
        return planner(PlannerParams(args.eps, args.eta, **kwargs))
    except (InfeasiblePlanError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def cmd_estimate(args) -> None:
    d = dataio.load(args.input)
    method = args.method
    if method in ("dir", "alt", "fourier") and d.space != "boolean":
        raise DataFormatError(f"--method {method} needs a boolean-mode dataset")
    if method == "angle" and d.space != "real":
        raise DataFormatError("--method angle needs a real-mode dataset (header {\"space\": \"real\"})")
    config = _chain(args, "estimate", method)
    if (args.eps is None) != (args.eta is None):
        raise UsageError("--eps and --eta go together")
    extra = {}
    if method == "fourier":
        if args.a is None:
            raise UsageError("--method fourier needs --a")
        report = estimate_fourier(d, FourierParams(args.a, args.c_of_h, args.kappa))
    elif method == "angle":
        if args.t is None:
            raise UsageError("--method angle needs --t")
        report = estimate_angle(d, args.t, config, args.pairing)
    elif args.adaptive:
        if method == "dir":
            stepper = DirStepper(d, args.batch_pairs, args.batch_probes, config, args.pairing)
        else:
            s = args.s if args.s is not None else 20
            if s % 2:
                raise UsageError("--s must be even")
            stepper = AltStepper(d, args.batch_probes, s, config, args.pairing)
        report = run_until_converged(stepper, args.window, args.tol, args.max_batches)
    elif method == "dir":
        planned = _plan(args, plan_dir)
        m, l = planned if planned else (args.m, args.l)
        if m is None or l is None:
            raise UsageError("--method dir needs --eps/--eta or --m/--l")
        report = estimate_dir(d, m, l, config, args.workers, args.workers, args.pairing)
        if planned:
            extra = {"planned": {"m": m, "l": l, "eps": args.eps, "eta": args.eta}}
    else:
        planned = _plan(args, plan_alt)
        r, s = planned if planned else (args.r, args.s)
        if r is None or s is None:
            raise UsageError("--method alt needs --eps/--eta or --r/--s")
        if s % 2:
            raise UsageError("--s must be even")
        report = estimate_alt(d, r, s, config, args.shared_pool, args.workers, args.workers, args.pairing)
        if planned:
            extra = {"planned": {"r": r, "s": s, "eps": args.eps, "eta": args.eta}}
    out = report.to_dict(timing=args.timing)
    out["params"].update(extra)
    _emit_report(out, args)
    if args.dump_samples is not None:
        chain = HitAndRun(d, config.with_seed(chain_seed(config.seed, "dump")))
        lines = [json.dumps({"w": [float(c) for c in w]}) for w in chain.sample(args.dump_count)]
        args.dump_samples.write_text("\n".join(lines) + "\n")


def cmd_oracle(args) -> None:
    d = dataio.load(args.input)
    if args.dist == "uni":
        if d.n > 4:
            raise UsageError("--dist uni supports n <= 4")
        report = oracle_uni(d)
        count = report.params["hypothesis_count"]
    else:
        config = _chain(args, "oracle", "vol")
        report = oracle_vol(d, args.heavy_samples, config, args.workers)
        count = None
    out = {"distribution": args.dist, "diameter": report.diameter, "hypothesis_count": count}
    out.update({k: v for k, v in report.to_dict(timing=args.timing).items() if k != "diameter"})
    _emit_report(out, args)


def _structure_of(d):
    if d.k == 0:
        raise DataFormatError("empty dataset has no subcube structure")
    s = detect_subcube(d.X)
    if s is None:
        raise DataFormatError("the labeled points do not form a (v, I)-subcube")
    return s


def cmd_structure(args) -> None:
    d = dataio.load(args.input)
    s = _structure_of(d)
    if args.action == "orbits":
        rows = [{"weight": c.weight, "size": c.size, "representative": list(c.representative)}
                for c in orbit_representatives(s)]
        if args.format == "csv":
            _emit(_csv_rows(["weight", "size", "representative"],
                            [[r["weight"], r["size"], " ".join(str(v) for v in r["representative"])]
                             for r in rows]), args.out)
        else:
            _emit(_json({"v": list(s.v), "I": list(s.I), "q": s.q, "orbits": rows}), args.out)
        return
    trunc = None if args.full else TruncationParams(args.trunc_c)
    config = _chain(args, "structure", "estimate")
    report = structured_diameter(d, s, trunc, args.pairs, config, args.workers)
    _emit_report(report.to_dict(timing=args.timing), args)


def cmd_experiment(args) -> None:
    if args.k < 0 or args.k % 2:
        raise UsageError("--k must be a non-negative even number (bad and good datasets pair points)")
    cfg = BagConfig(n=args.n, k=args.k, reps_per_kind=args.reps, estimator=args.estimator,
                    master_seed=args.seed, chain=ChainConfig(args.warmup, args.thinning, args.seed),
                    window=args.window, tol=args.tol, pairing=args.pairing, dist_samples=args.dist_samples,
                    workers=args.workers)
    result = bag_experiment(cfg)
    if args.format == "json":
        rows = [{f: getattr(r, f) for f in r.CSV_FIELDS} for r in result.rows]
        if not args.timing:
            for r in rows:
                r["duration_ms"] = None
        _emit(_json({"rows": rows, "summary": result.summary}), args.out)
        return
    _emit(result.to_csv(timing=args.timing), args.out)
    if args.out is not None:
        args.out.with_name(args.out.stem + ".summary.json").write_text(result.summary_json() + "\n")


COMMANDS = {"gen": cmd_gen, "estimate": cmd_estimate, "oracle": cmd_oracle, "structure": cmd_structure,
            "experiment": cmd_experiment}


def _configure_logging() -> None:
    level = os.environ.get("DIAM_LOG", "error").upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "ERROR"
    logging.basicConfig(level=getattr(logging, level), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"diamest: usage error: {exc}", file=sys.stderr)
        return 1
    except (DataFormatError, NonSeparableError, DegenerateChordError, DimensionError, OSError) as exc:
        print(f"diamest: data error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"diamest: data error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
