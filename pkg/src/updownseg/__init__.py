"""Optimal up-down constrained changepoint models for run-length-encoded count data.

The solver fits piecewise-constant Poisson mean models in which segment
means must alternate: up-change into a peak, down-change back to
background.  A penalty is paid per peak; a sequential search drives the
penalty toward a requested number of peaks.
"""

from .profiles import ProfileData, profile_from_counts
from .solver import (
    LossSummary,
    Segment,
    SegmentModel,
    SolveConfig,
    recompute_loss,
    solve,
    solve_infinite_penalty,
)
from .search import SearchIterate, SearchResult, compute_next_penalty, sequential_search
from .files import cached_solve, parse_bedgraph, write_loss, write_segments, write_trace
from .oracle import brute_force_solve, constrained_segment_fit

__all__ = [
    "ProfileData",
    "profile_from_counts",
    "SolveConfig",
    "Segment",
    "SegmentModel",
    "LossSummary",
    "solve",
    "solve_infinite_penalty",
    "recompute_loss",
    "SearchIterate",
    "SearchResult",
    "compute_next_penalty",
    "sequential_search",
    "parse_bedgraph",
    "write_segments",
    "write_loss",
    "write_trace",
    "cached_solve",
    "brute_force_solve",
    "constrained_segment_fit",
]

__version__ = "0.1.0"
