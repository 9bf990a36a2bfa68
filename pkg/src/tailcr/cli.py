"""Command-line entry point: ``tailcr <command> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
"""
import argparse
import logging
import sys

import numpy as np

from . import sim
from .distributions import parse_dist, sample, upper_quantile
from .errors import CsvParseError, InvalidInputError, TailcrError
from .io import load_csv, write_csv
from .lr import lr_region
from .normal import normal_region
from .region import METHODS
from .tail import make_tail_sample
from .tilt import tilt_region

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def int_grid(text):
    """``lo:hi:step`` (inclusive) or a comma list."""
    try:
        if ":" in text:
            lo, hi, step = (int(v) for v in text.split(":"))
            if step <= 0 or hi < lo:
                raise ValueError
            return list(range(lo, hi + 1, step))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer grid {text!r} (use lo:hi:step)")


def float_grid(text):
    try:
        if ":" in text:
            lo, hi, step = (float(v) for v in text.split(":"))
            if step <= 0 or hi < lo:
                raise ValueError
            count = int(round((hi - lo) / step)) + 1
            return [lo + i * step for i in range(count)]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r} (use lo:hi:step)")


def method_list(text):
    items = [m.strip().lower() for m in text.split(",") if m.strip()]
    if items == ["all"]:
        return list(METHODS)
    bad = [m for m in items if m not in METHODS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"methods must come from {','.join(METHODS)}")
    return items


def _add_dist(p, required=False):
    p.add_argument("--dist", choices=["burr", "frechet"], required=required)
    p.add_argument("--a", type=float, default=1.0, help="first shape parameter")
    p.add_argument("--b", type=float, default=None, help="second Burr shape parameter")


def build_parser():
    parser = _Parser(prog="tailcr", description="Confidence regions for extreme quantiles.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ci = sub.add_parser("ci", help="point estimate and one confidence region")
    ci.add_argument("--input", help="single-column CSV of positive values")
    _add_dist(ci)
    ci.add_argument("--n", type=int, default=1000, help="synthetic sample size")
    ci.add_argument("--seed", type=int, default=0)
    ci.add_argument("--p", type=float, required=True)
    ci.add_argument("--k", type=int, required=True)
    ci.add_argument("--method", type=method_list, default=["tilt"])
    ci.add_argument("--level", type=float, default=0.9)
    ci.add_argument("--region-mode", choices=["bisect", "step"], default="bisect")
    ci.add_argument("--step", type=float, default=0.1)
    ci.add_argument("--skip-invalid", action="store_true")
    ci.add_argument("--out")

    simp = sub.add_parser("simulate", help="Monte Carlo coverage or length tables")
    simp.add_argument("what", choices=["coverage", "length"])
    _add_dist(simp, required=True)
    simp.add_argument("--n", type=int, default=1000)
    simp.add_argument("--reps", type=int, default=sim.DEFAULT_REPS)
    simp.add_argument("--full-scale", action="store_true",
                      help=f"use {sim.PAPER_REPS} replicates")
    simp.add_argument("--p", type=float, default=0.01)
    simp.add_argument("--k-grid", type=int_grid, default=int_grid("20:300:5"))
    simp.add_argument("--methods", type=method_list, default=list(METHODS))
    simp.add_argument("--level", type=float, default=0.9)
    simp.add_argument("--seed", type=int, default=0)
    simp.add_argument("--region-mode", choices=["bisect", "step"], default="bisect")
    simp.add_argument("--step", type=float, default=0.1)
    simp.add_argument("--out")

    prof = sub.add_parser("profile", help="statistic profiles along a grid of x_p")
    prof.add_argument("--input")
    _add_dist(prof)
    prof.add_argument("--n", type=int, default=1000)
    prof.add_argument("--seed", type=int, default=0)
    prof.add_argument("--p", type=float, required=True)
    prof.add_argument("--k", type=int, required=True)
    prof.add_argument("--offsets", type=float_grid, default=float_grid("-50:150:1"))
    prof.add_argument("--center", choices=["estimate", "truth"], default="estimate",
                      help="offset origin; 'truth' needs a synthetic --dist")
    prof.add_argument("--skip-invalid", action="store_true")
    prof.add_argument("--out")

    ks = sub.add_parser("kscan", help="regions across a k grid on one dataset")
    ks.add_argument("--input", required=True)
    ks.add_argument("--p", type=float, default=0.001)
    ks.add_argument("--level", type=float, default=0.9)
    ks.add_argument("--k-grid", type=int_grid, default=int_grid("60:400:5"))
    ks.add_argument("--methods", type=method_list, default=list(METHODS))
    ks.add_argument("--region-mode", choices=["bisect", "step"], default="bisect")
    ks.add_argument("--step", type=float, default=0.1)
    ks.add_argument("--skip-invalid", action="store_true")
    ks.add_argument("--out")

    ex = sub.add_parser("expansion", help="predicted coverage of the normal interval")
    _add_dist(ex)
    ex.add_argument("--n", type=int, default=1000)
    ex.add_argument("--p", type=float, default=0.01)
    ex.add_argument("--level", type=float, default=0.9)
    ex.add_argument("--k-grid", type=int_grid, default=int_grid("20:300:5"))
    ex.add_argument("--convention", choices=["exponent", "index"], default="exponent")
    ex.add_argument("--out")
    return parser


def _dist(args):
    if args.dist is None:
        raise UsageError("either --input or --dist is required")
    return parse_dist(args.dist, args.a, args.b)


def _data(args):
    if args.input:
        return load_csv(args.input, skip_invalid=args.skip_invalid).values, None
    dist = _dist(args)
    return sample(dist, args.n, sim.replicate_rng(args.seed, 0)), dist


def _emit(table, out):
    if out:
        write_csv(table, out)
    else:
        write_csv(table, sys.stdout)


def cmd_ci(args):
    data, _ = _data(args)
    if not 1 <= args.k < data.size:
        raise UsageError(f"--k must satisfy 1 <= k < n (got k={args.k}, n={data.size})")
    if not 0 < args.p < 1:
        raise UsageError("--p must lie in (0, 1)")
    ts = make_tail_sample(data, args.k)
    regions = []
    for m in args.method:
        if m == "normal":
            regions.append(normal_region(ts, args.p, args.level))
        else:
            fn = lr_region if m == "lr" else tilt_region
            regions.append(fn(ts, args.p, args.level, mode=args.region_mode, step=args.step))
    _emit(regions, args.out)


def cmd_simulate(args):
    cfg = sim.ExperimentConfig(
        dist=_dist(args), n=args.n,
        reps=sim.PAPER_REPS if args.full_scale else args.reps,
        p=args.p, k_grid=args.k_grid, methods=tuple(args.methods), level=args.level,
        master_seed=args.seed, region_mode=args.region_mode, step=args.step)
    run = sim.run_coverage if args.what == "coverage" else sim.run_length
    _emit(run(cfg), args.out)


def cmd_profile(args):
    data, dist = _data(args)
    center = None
    if args.center == "truth":
        if dist is None:
            raise UsageError("--center truth needs a synthetic --dist")
        center = upper_quantile(dist, args.p)
    if not 1 <= args.k < data.size:
        raise UsageError(f"--k must satisfy 1 <= k < n (got k={args.k}, n={data.size})")
    _emit(sim.profile_curve(data, args.p, args.k, args.offsets, center=center), args.out)


def cmd_kscan(args):
    data = load_csv(args.input, skip_invalid=args.skip_invalid).values
    _emit(sim.kscan(data, args.p, args.level, args.k_grid, args.methods,
                    mode=args.region_mode, step=args.step), args.out)


def cmd_expansion(args):
    dist = parse_dist(args.dist, args.a, args.b) if args.dist else None
    bad = [k for k in args.k_grid if not k < args.n * 1.0]
    if bad:
        raise UsageError(f"k values must be below n: {bad}")
    _emit(sim.expansion_table(args.n, args.p, args.level, args.k_grid, dist,
                              args.convention), args.out)


COMMANDS = {"ci": cmd_ci, "simulate": cmd_simulate, "profile": cmd_profile,
            "kscan": cmd_kscan, "expansion": cmd_expansion}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (UsageError, InvalidInputError, CsvParseError, OSError) as exc:
        print(f"tailcr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TailcrError as exc:
        print(f"tailcr {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
