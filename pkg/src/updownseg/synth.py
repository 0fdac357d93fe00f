"""Seeded synthetic profiles for benchmarks and validation suites."""

from __future__ import annotations

import math

import numpy as np

from .profiles import profile_from_counts

VALIDATION_PENALTIES = (0.0, 0.5, 1.0, 5.0, math.inf)


def benchmark_profile(n_rows, seed=0, background_mean=2.0, peak_mean=20.0,
                      chrom="chrSim"):
    """A noisy alternating-mean profile with exactly ``n_rows`` coalesced rows.

    The underlying truth is piecewise constant with on the order of
    ``sqrt(n_rows)`` segments whose Poisson means alternate between
    ``background_mean`` and ``peak_mean``; row widths vary, and adjacent
    rows that happen to draw the same count are coalesced before the
    profile is cut to exactly ``n_rows`` rows.
    """
    if n_rows < 1:
        raise ValueError(f"need at least one row, got {n_rows}")
    rng = np.random.default_rng(seed)
    n_segments = max(1, int(round(math.sqrt(n_rows))))
    rows_per_segment = max(1, n_rows // n_segments)
    counts = []
    widths = []
    state = 0
    while len(counts) < n_rows:
        mean = background_mean if state == 0 else peak_mean
        length = 1 + int(rng.poisson(rows_per_segment))
        segment_counts = rng.poisson(mean, size=length)
        segment_widths = rng.integers(1, 20, size=length)
        for z, w in zip(segment_counts, segment_widths):
            z = int(z)
            w = int(w)
            if counts and counts[-1] == z:
                widths[-1] += w
            else:
                counts.append(z)
                widths.append(w)
        state = 1 - state
    counts = counts[:n_rows]
    widths = widths[:n_rows]
    if n_rows > 1 and len(set(counts)) == 1:
        counts[-1] += 1  # keep tiny profiles non-degenerate
    return profile_from_counts(np.array(counts), np.array(widths), chrom=chrom)


def validation_profile(seed):
    """A small random profile: 2-12 rows, counts 0-5, weights in {1, 2, 3}."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 13))
    counts = rng.integers(0, 6, size=n)
    weights = rng.choice(np.array([1, 2, 3]), size=n)
    return profile_from_counts(counts, weights)


def validation_case(index, seed=0):
    """Deterministic (profile, penalty) pair number ``index`` of a suite."""
    profile = validation_profile(seed * 1_000_003 + index)
    penalty = VALIDATION_PENALTIES[index % len(VALIDATION_PENALTIES)]
    return profile, penalty
