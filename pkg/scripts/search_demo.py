#!/usr/bin/env python3
"""Run the sequential penalty search for several peak-count targets.

Builds one seeded synthetic profile, then for each requested target peak
count runs the search and prints its iterate table followed by a summary
line comparing the number of solves against the logarithmic bound
2*log2(target+2)+4.

Example:
    python3 scripts/search_demo.py --n 20000 --targets 5,10,50
"""

import argparse
import math
import sys

from updownseg import SolveConfig, sequential_search
from updownseg.files import TRACE_COLUMNS, format_number
from updownseg.synth import benchmark_profile


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=20_000,
                        help="profile size (rows)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--targets", default="5,10,50",
                        help="comma-separated target peak counts")
    parser.add_argument("--storage", choices=("memory", "disk"),
                        default="memory")
    parser.add_argument("--workdir", default=None,
                        help="directory for disk cost files")
    return parser.parse_args(argv)


def print_trace(trace):
    print("\t".join(TRACE_COLUMNS))
    for row in trace:
        print("\t".join((
            str(row.iteration),
            "NA" if row.under is None else str(row.under),
            "NA" if row.over is None else str(row.over),
            format_number(row.penalty),
            str(row.peaks),
            format_number(row.total_loss))))


def main(argv=None):
    args = parse_args(argv)
    targets = [int(t) for t in args.targets.split(",") if t]
    if not targets or any(t < 0 for t in targets):
        print(f"invalid --targets {args.targets!r}", file=sys.stderr)
        return 1
    data = benchmark_profile(args.n, seed=args.seed)
    config = SolveConfig(penalty=0.0, storage=args.storage,
                         workdir=args.workdir)
    print(f"profile: {data.n} rows, {data.bases} bases, "
          f"counts in [{data.zmin:g}, {data.zmax:g}]", file=sys.stderr)
    for target in targets:
        result = sequential_search(data, target, config)
        print(f"# target={target}")
        print_trace(result.trace)
        bound = 2.0 * math.log2(target + 2) + 4.0
        kind = "exact" if result.exact else "closest-under"
        print(f"# {kind}: {result.summary.peaks} peaks at penalty "
              f"{format_number(result.summary.penalty)} after "
              f"{len(result.trace)} solves (bound {bound:.1f})")
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
