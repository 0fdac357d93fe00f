"""Run-length-encoded coverage profiles on a single chromosome.

A profile is a sequence of half-open genomic intervals
``[start, end)`` with a non-negative integer count each; interval
widths act as observation weights for the Poisson data-fitting term.
"""

from __future__ import annotations

import numpy as np

MAX_COUNT = 2**32 - 1
MAX_COORD = 2**63 - 1


class ProfileData:
    """Weighted count rows for one chromosome.

    Parameters
    ----------
    chrom:
        Chromosome name, e.g. ``"chr11"``.
    starts, ends, counts:
        Equal-length integer arrays; rows must be contiguous
        (``ends[i] == starts[i+1]``) and non-empty with
        ``starts < ends`` and ``counts >= 0``.
    """

    __slots__ = ("chrom", "starts", "ends", "counts", "weights",
                 "zmin", "zmax", "bases", "n")

    def __init__(self, chrom, starts, ends, counts):
        starts = np.asarray(starts, dtype=np.int64)
        ends = np.asarray(ends, dtype=np.int64)
        counts = np.asarray(counts, dtype=np.int64)
        if starts.ndim != 1 or starts.shape != ends.shape or starts.shape != counts.shape:
            raise ValueError("starts, ends and counts must be 1-d arrays of equal length")
        if starts.size == 0:
            raise ValueError("profile has no rows")
        if np.any(starts >= ends):
            raise ValueError("every row must satisfy start < end")
        if np.any(starts[1:] != ends[:-1]):
            raise ValueError("rows must be contiguous (no gaps or overlaps)")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        if counts.max() > MAX_COUNT:
            raise ValueError(f"count exceeds {MAX_COUNT}")
        if ends[-1] > MAX_COORD:
            raise ValueError(f"coordinate exceeds {MAX_COORD}")
        self.chrom = chrom
        self.starts = starts
        self.ends = ends
        self.counts = counts
        self.weights = ends - starts
        self.zmin = int(counts.min())
        self.zmax = int(counts.max())
        self.bases = int(self.weights.sum())
        self.n = int(counts.size)

    def __repr__(self):
        return (f"ProfileData({self.chrom}: {self.n} rows, {self.bases} bases, "
                f"counts in [{self.zmin}, {self.zmax}])")

    def row_of_start(self, base):
        """Index of the row whose interval starts at genomic position ``base``."""
        i = int(np.searchsorted(self.starts, base))
        if i >= self.n or int(self.starts[i]) != base:
            raise ValueError(f"no row starts at position {base}")
        return i


def profile_from_counts(counts, weights=None, chrom="chrSim", start=0):
    """Build a contiguous profile where row widths equal the given weights.

    Convenient for tests and synthetic data: ``weights`` defaults to all
    ones, making each row one base wide.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if weights is None:
        weights = np.ones_like(counts)
    else:
        weights = np.asarray(weights, dtype=np.int64)
    if weights.shape != counts.shape:
        raise ValueError("weights must match counts in length")
    if counts.size and weights.size and np.any(weights < 1):
        raise ValueError("weights must be >= 1")
    ends = start + np.cumsum(weights)
    starts = np.concatenate(([start], ends[:-1]))
    return ProfileData(chrom, starts, ends, counts)
