"""Sequential penalty search for a requested number of peaks.

The optimal penalized cost as a function of the penalty is the lower
envelope of one line per achievable peak count (slope = peak count).
The search keeps an under-bound and an over-bound on the target and
repeatedly solves at the penalty where the two bound lines intersect;
each solve either hits the target exactly, tightens a bound, or proves
the target count is not on the envelope (in which case the closest
model from below is returned).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .solver import SolveConfig, solve


@dataclass(frozen=True)
class SearchIterate:
    """One solve performed during the search, as written to the trace file.

    ``under``/``over`` are the bounding peak counts used to choose
    ``penalty`` (``None`` for the two initial extreme solves, which share
    iteration number 1).
    """

    iteration: int
    under: int | None
    over: int | None
    penalty: float
    peaks: int
    total_loss: float


@dataclass(frozen=True)
class SearchResult:
    """Final model plus the full iterate trace.

    ``exact`` reports whether the returned model has exactly the
    requested number of peaks.
    """

    model: object
    summary: object
    trace: tuple
    exact: bool


def compute_next_penalty(under_loss, under_peaks, over_loss, over_peaks):
    """Penalty where the two bounding cost lines intersect.

    Requires ``over_peaks > under_peaks`` and finite losses; the result
    is always >= 0 because the lower-peak model has the larger loss.
    """
    if over_peaks <= under_peaks:
        raise ValueError(
            f"bounds must satisfy over_peaks > under_peaks, got "
            f"{under_peaks} and {over_peaks}")
    if not (math.isfinite(under_loss) and math.isfinite(over_loss)):
        raise ValueError("bound losses must be finite")
    return (over_loss - under_loss) / (under_peaks - over_peaks)


def sequential_search(data, target_peaks, config=None):
    """Search penalties until a model with ``target_peaks`` peaks is found.

    ``config`` carries the storage options for every inner solve (its
    ``penalty`` field is ignored).  If no model with exactly the target
    number of peaks exists at any penalty, the search returns the model
    with the most peaks not exceeding the target and ``exact=False``.
    """
    if target_peaks < 0:
        raise ValueError(f"target peak count must be >= 0, got {target_peaks}")
    cfg = config if config is not None else SolveConfig(penalty=0.0)

    trace = []
    model_zero, sum_zero = solve(data, replace(cfg, penalty=0.0))
    trace.append(SearchIterate(1, None, None, 0.0, sum_zero.peaks,
                               sum_zero.total_loss))
    model_inf, sum_inf = solve(data, replace(cfg, penalty=math.inf))
    trace.append(SearchIterate(1, None, None, math.inf, sum_inf.peaks,
                               sum_inf.total_loss))

    max_peaks = sum_zero.peaks
    if target_peaks == 0:
        return SearchResult(model_inf, sum_inf, tuple(trace), True)
    if target_peaks >= max_peaks:
        return SearchResult(model_zero, sum_zero, tuple(trace),
                            max_peaks == target_peaks)

    under_peaks, under_loss = sum_inf.peaks, sum_inf.total_loss
    under_model, under_summary = model_inf, sum_inf
    over_peaks, over_loss = sum_zero.peaks, sum_zero.total_loss
    iteration = 1
    while True:
        iteration += 1
        penalty = compute_next_penalty(under_loss, under_peaks,
                                       over_loss, over_peaks)
        model, summary = solve(data, replace(cfg, penalty=penalty))
        trace.append(SearchIterate(iteration, under_peaks, over_peaks,
                                   penalty, summary.peaks, summary.total_loss))
        peaks = summary.peaks
        if peaks == target_peaks:
            return SearchResult(model, summary, tuple(trace), True)
        if peaks in (under_peaks, over_peaks):
            # The bound lines meet on the envelope: no model with the
            # target count exists at any penalty.
            return SearchResult(under_model, under_summary, tuple(trace), False)
        if not under_peaks < peaks < over_peaks:
            raise RuntimeError(
                f"solve at penalty {penalty} returned {peaks} peaks, outside "
                f"the open bound interval ({under_peaks}, {over_peaks})")
        if peaks < target_peaks:
            under_peaks, under_loss = peaks, summary.total_loss
            under_model, under_summary = model, summary
        else:
            over_peaks, over_loss = peaks, summary.total_loss
