"""Optimal up-down constrained segmentation of one weighted count profile.

For a penalty ``lambda >= 0`` the solver minimizes total weighted
Poisson loss plus ``lambda`` per peak, over all piecewise-constant mean
vectors that start and end in background and alternate
background <= peak >= background ...  The forward pass keeps, for each
data row, the optimal cost-to-come as a function of the current segment
mean, for each of the two states; running-minimum operators implement
the mean inequality at each candidate changepoint, and functional
pruning keeps only pieces that are optimal for some mean.

Decoding follows stored back-pointers from the best final background
mean; the reported ``total_loss`` is recomputed independently from the
decoded segments, so comparing it against the dynamic-programming
objective (``mean_pen_cost * bases``) cross-checks the two code paths.
"""

from __future__ import annotations

import math
import shutil
import tempfile
from dataclasses import dataclass

from .piecewise import (
    EQUALITY,
    add,
    add_constant,
    arg_min,
    find_mean,
    min_less,
    min_more,
    min_of_two,
    one_piece,
    simplify,
)
from .storage import CostColumn, open_store

BACKGROUND = "background"
PEAK = "peak"


@dataclass(frozen=True)
class SolveConfig:
    """How to run one solve: penalty and storage choices.

    ``penalty`` may be ``math.inf`` for the trivial one-segment model.
    ``storage`` selects the cost-function backend (``"memory"`` or
    ``"disk"``); ``workdir`` locates the disk files (a temporary
    directory is used when omitted) and ``keep_cost_files`` leaves
    ``cost.db``/``cost.idx`` behind for inspection instead of deleting
    them after decoding.
    """

    penalty: float
    storage: str = "memory"
    workdir: str | None = None
    keep_cost_files: bool = False


@dataclass(frozen=True)
class Segment:
    """One fitted segment: inclusive row span, genomic span, mean, state."""

    first: int
    last: int
    first_base: int
    last_base: int
    mean: float
    status: str


@dataclass(frozen=True)
class SegmentModel:
    """A decoded model: ordered segments plus decode bookkeeping."""

    chrom: str
    segments: tuple
    penalty: float
    equality_constraints: int

    @property
    def peaks(self):
        return (len(self.segments) - 1) // 2


@dataclass(frozen=True)
class LossSummary:
    """One row of model metadata, as written to ``*_loss.tsv``.

    ``mean_pen_cost`` is the dynamic-programming objective per base;
    ``total_loss`` is recomputed from the decoded segments.
    ``dp_cost`` keeps the raw objective for verification and is not
    written to disk.  ``mean_intervals``/``max_intervals`` count pieces
    per stored cost function; ``bytes_on_disk`` is the cost-file size
    (0 for the memory backend).
    """

    penalty: float
    segments: int
    peaks: int
    bases: int
    mean_pen_cost: float
    total_loss: float
    equality_constraints: int
    mean_intervals: float
    max_intervals: int
    dp_cost: float
    bytes_on_disk: int = 0


def _check_penalty(penalty):
    p = float(penalty)
    if math.isnan(p) or p < 0.0:
        raise ValueError(f"penalty must be >= 0, got {penalty}")
    return p


def segment_loss(mean, weight_sum, weighted_count_sum):
    """Weighted Poisson loss of one segment fitted at ``mean``."""
    if mean <= 0.0:
        return 0.0 if weighted_count_sum == 0 else math.inf
    return mean * weight_sum - math.log(mean) * weighted_count_sum


def recompute_loss(model, data):
    """Total weighted Poisson loss of ``model``, straight from its segments.

    Also verifies that the segments tile the profile's rows exactly.
    """
    segments = model.segments
    if not segments:
        raise ValueError("model has no segments")
    if segments[0].first != 0 or segments[-1].last != data.n - 1:
        raise ValueError("segments do not cover the profile")
    total = 0.0
    expected_first = 0
    weights = data.weights
    wz = data.weights * data.counts
    for seg in segments:
        if seg.first != expected_first or seg.last < seg.first:
            raise ValueError("segments do not tile the profile rows")
        expected_first = seg.last + 1
        w = int(weights[seg.first:seg.last + 1].sum())
        s = int(wz[seg.first:seg.last + 1].sum())
        total += segment_loss(seg.mean, w, s)
    return total


def _single_segment(data, penalty):
    # The optimal 0-peak model: one background segment at the weighted mean.
    wz = int((data.weights * data.counts).sum())
    mean = wz / data.bases
    seg = Segment(0, data.n - 1, int(data.starts[0]), int(data.ends[-1]),
                  mean, BACKGROUND)
    model = SegmentModel(data.chrom, (seg,), penalty, 0)
    loss = segment_loss(mean, data.bases, wz)
    summary = LossSummary(
        penalty=penalty, segments=1, peaks=0, bases=data.bases,
        mean_pen_cost=loss / data.bases, total_loss=loss,
        equality_constraints=0, mean_intervals=1.0, max_intervals=1,
        dp_cost=loss)
    return model, summary


def solve_infinite_penalty(data):
    """The infinite-penalty (no-peak) model: no recursion is run."""
    return _single_segment(data, math.inf)


def solve(data, config):
    """Fit the optimal constrained model for ``config.penalty``.

    Returns ``(SegmentModel, LossSummary)``.
    """
    penalty = _check_penalty(config.penalty)
    if math.isinf(penalty):
        return solve_infinite_penalty(data)
    if data.zmin == data.zmax:
        # Constant counts admit only the one-segment model.
        return _single_segment(data, penalty)

    created_tmp = None
    workdir = config.workdir
    if config.storage == "disk" and workdir is None:
        created_tmp = tempfile.mkdtemp(prefix="updownseg-")
        workdir = created_tmp
    store = open_store(config.storage, workdir)
    try:
        final_bg = _forward(data, penalty, store)
        segments, equality, dp_cost = _decode(data, store, final_bg)
        stats = store.stats()
    finally:
        store.close(delete=not config.keep_cost_files)
        if created_tmp is not None and not config.keep_cost_files:
            shutil.rmtree(created_tmp, ignore_errors=True)

    model = SegmentModel(data.chrom, tuple(segments), penalty, equality)
    _check_model(model, data)
    total_loss = recompute_loss(model, data)
    summary = LossSummary(
        penalty=penalty, segments=len(segments), peaks=model.peaks,
        bases=data.bases, mean_pen_cost=dp_cost / data.bases,
        total_loss=total_loss, equality_constraints=equality,
        mean_intervals=stats.mean_pieces, max_intervals=stats.max_pieces,
        dp_cost=dp_cost, bytes_on_disk=stats.bytes_written)
    return model, summary


def _forward(data, penalty, store):
    counts = data.counts
    weights = data.weights
    lo = float(data.zmin)
    hi = float(data.zmax)
    n = data.n
    bg = one_piece(int(counts[0]), int(weights[0]), lo, hi)
    store.push_column(CostColumn(0, bg, None))
    pk = None
    for i in range(1, n):
        data_term = one_piece(int(counts[i]), int(weights[i]), lo, hi)
        # peak state: either change up from background (paying the
        # penalty, with the new mean >= the old one) or stay in the peak
        up = add_constant(min_less(i - 1, bg), penalty)
        new_pk = up if pk is None else min_of_two(up, pk)
        new_pk = simplify(add(new_pk, data_term))
        # background state: either change down from the peak (free, new
        # mean <= old) or stay in background
        if pk is None:
            new_bg = add(bg, data_term)
        else:
            new_bg = add(min_of_two(min_more(i - 1, pk), bg), data_term)
        new_bg = simplify(new_bg)
        store.push_column(CostColumn(i, new_bg, new_pk))
        bg, pk = new_bg, new_pk
    return bg


def _decode(data, store, final_bg):
    best = arg_min(final_bg)
    dp_cost = best.cost
    mean = best.mean
    prev_end = best.prev_end
    prev_mean = best.prev_mean
    means = [mean]
    ends = [prev_end]
    equality = 0
    seg = 1
    while prev_end is not None:
        if prev_mean == EQUALITY:
            equality += 1
        else:
            mean = prev_mean
        state = 1 if seg % 2 == 1 else 0
        fn = store.get(prev_end, state)
        prev_end, prev_mean = find_mean(fn, mean)
        seg += 1
        means.append(mean)
        ends.append(prev_end)
    if len(means) % 2 == 0:
        raise RuntimeError(f"decoded an even number of segments ({len(means)})")
    segments = []
    last = data.n - 1
    starts = data.starts
    data_ends = data.ends
    for k, (mean_k, end_k) in enumerate(zip(means, ends)):
        first = 0 if end_k is None else end_k + 1
        if first > last:
            raise RuntimeError("decoded an empty segment")
        status = BACKGROUND if k % 2 == 0 else PEAK
        segments.append(Segment(first, last, int(starts[first]),
                                int(data_ends[last]), mean_k, status))
        last = first - 1
    segments.reverse()
    return segments, equality, dp_cost


def _check_model(model, data):
    # Internal sanity: alternation, mean bounds and constraint directions.
    segs = model.segments
    slack = 1e-9 * (1.0 + data.zmax)
    for k, seg in enumerate(segs):
        want = BACKGROUND if k % 2 == 0 else PEAK
        if seg.status != want:
            raise RuntimeError(f"segment {k} has status {seg.status}, expected {want}")
        if not (data.zmin - slack <= seg.mean <= data.zmax + slack):
            raise RuntimeError(f"segment {k} mean {seg.mean} outside the count range")
        if k == 0:
            continue
        prev = segs[k - 1].mean
        if seg.status == PEAK:
            if seg.mean < prev - slack:
                raise RuntimeError(f"up-change into segment {k} decreases the mean")
        elif seg.mean > prev + slack:
            raise RuntimeError(f"down-change into segment {k} increases the mean")
