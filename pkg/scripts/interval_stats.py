#!/usr/bin/env python3
"""Measure solve time and stored-interval growth across profile sizes.

Runs one solve per (size, backend, penalty) triple on seeded synthetic
profiles, prints the raw benchmark table, then summarizes how the mean
number of stored cost-function intervals grows with the profile size —
the quantity that should stay logarithmic for functional pruning to pay
off.

Example:
    python3 scripts/interval_stats.py --sizes 1000,10000 --penalties 4
"""

import argparse
import math
import sys

from updownseg.bench import BENCH_SIZES, format_bench_table, run_benchmark


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes",
                        default=",".join(str(n) for n in BENCH_SIZES),
                        help="comma-separated profile sizes")
    parser.add_argument("--penalties", type=int, default=8,
                        help="log-spaced penalties per size")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--backends", default="memory,disk",
                        help="comma-separated subset of memory,disk")
    parser.add_argument("--workdir", default=None,
                        help="directory for disk cost files")
    parser.add_argument("--out", default=None,
                        help="also write the raw table to this TSV file")
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    sizes = tuple(int(s) for s in args.sizes.split(",") if s)
    backends = tuple(b for b in args.backends.split(",") if b)
    rows = run_benchmark(sizes=sizes, seed=args.seed, backends=backends,
                         penalty_count=args.penalties, workdir=args.workdir,
                         progress=lambda line: print(line, file=sys.stderr))
    table = format_bench_table(rows)
    print(table, end="")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(table)

    print()
    print("size\tmean.intervals\tmax.intervals\t5*log2(N)\tseconds/row")
    baseline = None
    for n in sizes:
        here = [r for r in rows if r["N"] == n]
        mean_intervals = sum(r["mean.intervals"] for r in here) / len(here)
        max_intervals = max(r["max.intervals"] for r in here)
        seconds = sum(r["seconds"] for r in here) / len(here)
        print(f"{n}\t{mean_intervals:.3f}\t{max_intervals}"
              f"\t{5.0 * math.log2(n):.1f}\t{seconds:.3f}")
        if baseline is None:
            baseline = (n, mean_intervals)
    if baseline is not None and len(sizes) > 1:
        n0, intervals0 = baseline
        n1 = sizes[-1]
        here = [r for r in rows if r["N"] == n1]
        intervals1 = sum(r["mean.intervals"] for r in here) / len(here)
        print(f"\ngrowth: mean.intervals x{intervals1 / intervals0:.2f} "
              f"while N grew x{n1 / n0:.0f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
