"""Timing and interval-count benchmarks over synthetic profiles."""

from __future__ import annotations

import math
import time

import numpy as np

from .solver import SolveConfig, solve
from .synth import benchmark_profile

BENCH_SIZES = (1_000, 10_000, 100_000)
BENCH_COLUMNS = ("N", "penalty", "backend", "seconds", "mean.intervals",
                 "max.intervals", "bytes.on.disk")


def bench_penalties(n, count=8):
    """``count`` log-spaced penalties strictly inside ``(log n, n)``."""
    return tuple(float(p) for p in
                 np.geomspace(math.log(n), float(n), count + 2)[1:-1])


def run_benchmark(sizes=BENCH_SIZES, seed=0, backends=("memory", "disk"),
                  penalty_count=8, workdir=None, progress=None):
    """Time one solve per (size, backend, penalty) triple.

    Returns a list of row dicts keyed by :data:`BENCH_COLUMNS`.
    ``progress`` is an optional callable receiving one line per solve.
    """
    rows = []
    for n in sizes:
        data = benchmark_profile(n, seed=seed)
        for backend in backends:
            for penalty in bench_penalties(n, penalty_count):
                config = SolveConfig(penalty=penalty, storage=backend,
                                     workdir=workdir)
                begin = time.perf_counter()
                _, summary = solve(data, config)
                seconds = time.perf_counter() - begin
                row = {
                    "N": n,
                    "penalty": penalty,
                    "backend": backend,
                    "seconds": seconds,
                    "mean.intervals": summary.mean_intervals,
                    "max.intervals": summary.max_intervals,
                    "bytes.on.disk": summary.bytes_on_disk,
                }
                rows.append(row)
                if progress is not None:
                    progress(f"N={n} backend={backend} penalty={penalty:.4g} "
                             f"seconds={seconds:.3f} peaks={summary.peaks}")
    return rows


def format_bench_table(rows):
    """Render benchmark rows as the TSV table printed by the CLI."""
    lines = ["\t".join(BENCH_COLUMNS)]
    for row in rows:
        lines.append("\t".join((
            str(row["N"]),
            f"{row['penalty']:.6g}",
            row["backend"],
            f"{row['seconds']:.6f}",
            f"{row['mean.intervals']:.4f}",
            str(row["max.intervals"]),
            str(row["bytes.on.disk"]))))
    return "\n".join(lines) + "\n"
