"""Command-line interface: solve, search, bench, validate.

Exit status is 0 on success, 1 for invalid input (bad flag values or
malformed data files) and 2 for I/O failures.  Only the documented
tables go to stdout; progress and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bench import BENCH_SIZES, format_bench_table, run_benchmark
from .files import (
    LOSS_COLUMNS,
    TRACE_COLUMNS,
    cache_paths,
    cached_solve,
    format_number,
    parse_bedgraph,
    parse_penalty,
    write_loss,
    write_segments,
    write_trace,
)
from .oracle import verify_against_oracle
from .search import sequential_search
from .solver import SolveConfig
from .synth import validation_case

WORKDIR_ENV = "UPDOWNSEG_WORKDIR"


def _add_storage_flags(parser):
    parser.add_argument("--storage", choices=("memory", "disk"),
                        default="memory", help="cost-function backend")
    parser.add_argument("--workdir", default=None,
                        help=f"directory for disk cost files "
                             f"(default: ${WORKDIR_ENV} or a temporary directory)")
    parser.add_argument("--keep-cost-files", action="store_true",
                        help="do not delete cost.db/cost.idx after decoding")


def _storage_config(args, penalty=0.0):
    workdir = args.workdir if args.workdir is not None \
        else os.environ.get(WORKDIR_ENV)
    return SolveConfig(penalty=penalty, storage=args.storage,
                       workdir=workdir, keep_cost_files=args.keep_cost_files)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="updownseg",
        description="Optimal up-down constrained peak models for "
                    "run-length-encoded count data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="fit the optimal model at one penalty")
    p.add_argument("data", help="bedGraph coverage file")
    p.add_argument("--penalty", required=True,
                   help="non-negative penalty per peak, or 'Inf'")
    _add_storage_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("search", help="search penalties for a target peak count")
    p.add_argument("data", help="bedGraph coverage file")
    p.add_argument("--peaks", type=int, required=True,
                   help="requested number of peaks")
    _add_storage_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="time solves on synthetic profiles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", default=",".join(str(n) for n in BENCH_SIZES),
                   help="comma-separated profile sizes")
    p.add_argument("--penalties", type=int, default=8,
                   help="log-spaced penalties per size")
    p.add_argument("--out", default=None, help="write the TSV here instead of stdout")
    p.add_argument("--workdir", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate",
                       help="check the solver against the exhaustive oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=200,
                   help="number of random instances")
    p.set_defaults(func=cmd_validate)

    return parser


def cmd_solve(args):
    penalty = parse_penalty(args.penalty)  # fail fast, before reading data
    config = _storage_config(args, penalty)
    _, summary = cached_solve(args.data, args.penalty, config)
    loss_path, seg_path = cache_paths(args.data, args.penalty)
    sys.stdout.write("\t".join(LOSS_COLUMNS) + "\n")
    sys.stdout.write("\t".join((
        format_number(summary.penalty), str(summary.segments),
        str(summary.peaks), str(summary.bases),
        format_number(summary.mean_pen_cost), format_number(summary.total_loss),
        str(summary.equality_constraints), format_number(summary.mean_intervals),
        str(summary.max_intervals))) + "\n")
    print(f"segments: {seg_path}", file=sys.stderr)
    print(f"loss: {loss_path}", file=sys.stderr)
    return 0


def cmd_search(args):
    if args.peaks < 0:
        raise ValueError(f"--peaks must be >= 0, got {args.peaks}")
    data = parse_bedgraph(args.data)
    config = _storage_config(args)
    result = sequential_search(data, args.peaks, config)
    trace_path = f"{args.data}_target={args.peaks}_trace.tsv"
    write_trace(result.trace, trace_path)
    penalty_string = format_number(result.summary.penalty)
    seg_path = f"{args.data}_penalty={penalty_string}_segments.tsv"
    loss_path = f"{args.data}_penalty={penalty_string}_loss.tsv"
    write_segments(result.model, seg_path)
    write_loss(result.summary, loss_path)
    sys.stdout.write("\t".join(TRACE_COLUMNS) + "\n")
    for it in result.trace:
        sys.stdout.write("\t".join((
            str(it.iteration),
            "NA" if it.under is None else str(it.under),
            "NA" if it.over is None else str(it.over),
            format_number(it.penalty), str(it.peaks),
            format_number(it.total_loss))) + "\n")
    kind = "exact" if result.exact else "closest-under"
    print(f"{kind} model: {result.summary.peaks} peaks at penalty "
          f"{penalty_string}", file=sys.stderr)
    print(f"trace: {trace_path}", file=sys.stderr)
    print(f"segments: {seg_path}", file=sys.stderr)
    print(f"loss: {loss_path}", file=sys.stderr)
    return 0


def cmd_bench(args):
    sizes = tuple(int(s) for s in args.sizes.split(",") if s)
    if not sizes or any(n < 2 for n in sizes):
        raise ValueError(f"invalid --sizes {args.sizes!r}")
    if args.penalties < 1:
        raise ValueError("--penalties must be >= 1")
    workdir = args.workdir if args.workdir is not None \
        else os.environ.get(WORKDIR_ENV)
    rows = run_benchmark(sizes=sizes, seed=args.seed,
                         penalty_count=args.penalties, workdir=workdir,
                         progress=lambda line: print(line, file=sys.stderr))
    table = format_bench_table(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(table)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(table)
    return 0


def cmd_validate(args):
    if args.count < 1:
        raise ValueError("--count must be >= 1")
    failures = 0
    for index in range(args.count):
        profile, penalty = validation_case(index, seed=args.seed)
        ok, message = verify_against_oracle(profile, penalty)
        label = f"{index:03d} n={profile.n} penalty={format_number(penalty)}"
        if ok:
            print(f"ok   {label} {message}")
        else:
            failures += 1
            print(f"FAIL {label} {message}")
    print(f"{args.count - failures}/{args.count} instances passed",
          file=sys.stderr)
    return 1 if failures else 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
