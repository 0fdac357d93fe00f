"""bedGraph input, TSV model output, and penalty-keyed result caching.

Input is four-column bedGraph text (chrom, chromStart, chromEnd, count)
with contiguous half-open intervals on one chromosome; interval widths
become observation weights.  A solve writes two files next to the data:
``<data>_penalty=<str>_segments.tsv`` (one row per segment) and
``<data>_penalty=<str>_loss.tsv`` (one header + one metadata row).  The
verbatim penalty string is the cache key, so ``10000`` and ``10000.0``
name different files even though they parse to the same penalty.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from .profiles import MAX_COORD, MAX_COUNT, ProfileData
from .search import SearchIterate
from .solver import (
    BACKGROUND,
    PEAK,
    LossSummary,
    Segment,
    SegmentModel,
    SolveConfig,
    solve,
)

LOSS_COLUMNS = ("penalty", "segments", "peaks", "bases", "mean.pen.cost",
                "total.loss", "equality.constraints", "mean.intervals",
                "max.intervals")
TRACE_COLUMNS = ("iteration", "under", "over", "penalty", "peaks", "total.loss")


class BedGraphError(ValueError):
    """Malformed bedGraph input; ``line`` is the 1-based offending line."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def format_number(x):
    """Render a float losslessly: ``Inf`` for infinity, no suffix for integers."""
    if math.isinf(x):
        return "Inf" if x > 0 else "-Inf"
    if x == math.floor(x) and abs(x) < 2**53:
        return str(int(x))
    return repr(float(x))


def parse_penalty(text):
    """Parse a penalty string: a non-negative decimal number or ``Inf``."""
    if text == "Inf":
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"invalid penalty {text!r}") from None
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"invalid penalty {text!r} (use 'Inf' for no peaks)")
    if value < 0.0:
        raise ValueError(f"penalty must be >= 0, got {text!r}")
    return value


def _parse_int(text, lineno, what):
    try:
        return int(text)
    except ValueError:
        raise BedGraphError(lineno, f"{what} {text!r} is not an integer") from None


def parse_bedgraph(source):
    """Read one-chromosome bedGraph coverage into a :class:`ProfileData`.

    ``source`` is a path or an open text stream.  Adjacent rows with
    equal counts are coalesced.  Any structural problem (wrong column
    count, non-integer or negative count, empty interval, gap, overlap,
    second chromosome, no data at all) raises :class:`BedGraphError`
    with the offending line number.
    """
    if hasattr(source, "read"):
        return _parse_stream(source)
    with open(source, "r", encoding="utf-8") as handle:
        return _parse_stream(handle)


def _parse_stream(stream):
    chrom = None
    starts, ends, counts = [], [], []
    lineno = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise BedGraphError(lineno, f"expected 4 columns, got {len(fields)}")
        name, start_text, end_text, count_text = fields
        start = _parse_int(start_text, lineno, "chromStart")
        end = _parse_int(end_text, lineno, "chromEnd")
        count = _parse_int(count_text, lineno, "count")
        if start < 0:
            raise BedGraphError(lineno, f"negative chromStart {start}")
        if end <= start:
            raise BedGraphError(lineno, f"empty interval [{start}, {end})")
        if end > MAX_COORD:
            raise BedGraphError(lineno, f"chromEnd {end} exceeds {MAX_COORD}")
        if count < 0:
            raise BedGraphError(lineno, f"negative count {count}")
        if count > MAX_COUNT:
            raise BedGraphError(lineno, f"count {count} exceeds {MAX_COUNT}")
        if chrom is None:
            chrom = name
        elif name != chrom:
            raise BedGraphError(lineno, f"multiple chromosomes: {chrom!r} then {name!r}")
        if ends:
            if start != ends[-1]:
                kind = "gap" if start > ends[-1] else "overlap"
                raise BedGraphError(
                    lineno, f"{kind}: interval starts at {start}, previous ended at {ends[-1]}")
            if count == counts[-1]:
                ends[-1] = end
                continue
        starts.append(start)
        ends.append(end)
        counts.append(count)
    if not counts:
        raise BedGraphError(lineno, "no data rows")
    return ProfileData(chrom, np.array(starts, dtype=np.int64),
                       np.array(ends, dtype=np.int64),
                       np.array(counts, dtype=np.int64))


def write_segments(model, path):
    """Write one headerless TSV row per segment, in genomic order."""
    lines = []
    for seg in model.segments:
        lines.append("\t".join((model.chrom, str(seg.first_base),
                                str(seg.last_base), seg.status,
                                format_number(seg.mean))))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_segments(path):
    """Parse a segments TSV back into ``(chrom, start, end, status, mean)`` rows."""
    rows = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise ValueError(f"segments line {lineno}: expected 5 columns")
        chrom, start_text, end_text, status, mean_text = fields
        if status not in (BACKGROUND, PEAK):
            raise ValueError(f"segments line {lineno}: unknown status {status!r}")
        rows.append((chrom, int(start_text), int(end_text), status,
                     float(mean_text)))
    if not rows:
        raise ValueError("segments file has no rows")
    return rows


def write_loss(summary, path):
    """Write the one-row model metadata table."""
    values = (format_number(summary.penalty), str(summary.segments),
              str(summary.peaks), str(summary.bases),
              format_number(summary.mean_pen_cost),
              format_number(summary.total_loss),
              str(summary.equality_constraints),
              format_number(summary.mean_intervals),
              str(summary.max_intervals))
    text = "\t".join(LOSS_COLUMNS) + "\n" + "\t".join(values) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def read_loss(path):
    """Parse a loss TSV back into a :class:`LossSummary`."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if ln.strip()]
    if len(lines) != 2:
        raise ValueError(f"loss file must have a header and one row, got {len(lines)} lines")
    header = tuple(lines[0].split("\t"))
    if header != LOSS_COLUMNS:
        raise ValueError(f"unexpected loss header {header}")
    fields = lines[1].split("\t")
    if len(fields) != len(LOSS_COLUMNS):
        raise ValueError("loss row has wrong column count")
    penalty = math.inf if fields[0] == "Inf" else float(fields[0])
    segments = int(fields[1])
    peaks = int(fields[2])
    bases = int(fields[3])
    mean_pen_cost = float(fields[4])
    total_loss = float(fields[5])
    return LossSummary(
        penalty=penalty, segments=segments, peaks=peaks, bases=bases,
        mean_pen_cost=mean_pen_cost, total_loss=total_loss,
        equality_constraints=int(fields[6]), mean_intervals=float(fields[7]),
        max_intervals=int(fields[8]), dp_cost=mean_pen_cost * bases)


def write_trace(trace, path):
    """Write the search iterate table (``NA`` for absent bounds)."""
    lines = ["\t".join(TRACE_COLUMNS)]
    for it in trace:
        lines.append("\t".join((
            str(it.iteration),
            "NA" if it.under is None else str(it.under),
            "NA" if it.over is None else str(it.over),
            format_number(it.penalty),
            str(it.peaks),
            format_number(it.total_loss))))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trace(path):
    """Parse a trace TSV back into :class:`SearchIterate` rows."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if ln.strip()]
    if not lines or tuple(lines[0].split("\t")) != TRACE_COLUMNS:
        raise ValueError("unexpected trace header")
    rows = []
    for line in lines[1:]:
        fields = line.split("\t")
        if len(fields) != len(TRACE_COLUMNS):
            raise ValueError("trace row has wrong column count")
        rows.append(SearchIterate(
            iteration=int(fields[0]),
            under=None if fields[1] == "NA" else int(fields[1]),
            over=None if fields[2] == "NA" else int(fields[2]),
            penalty=math.inf if fields[3] == "Inf" else float(fields[3]),
            peaks=int(fields[4]),
            total_loss=float(fields[5])))
    return rows


def cache_paths(data_path, penalty_string):
    """The pair of output paths keyed by the verbatim penalty string."""
    base = str(data_path)
    return (Path(f"{base}_penalty={penalty_string}_loss.tsv"),
            Path(f"{base}_penalty={penalty_string}_segments.tsv"))


def cached_solve(data_path, penalty_string, config=None):
    """Solve at a penalty given as text, reusing on-disk results when valid.

    If both output files already exist and pass consistency checks
    (penalty matches, segment rows tile the data, the stored objective
    satisfies the per-base identity) the model is reconstructed without
    running the solver.  Inconsistent files trigger a warning and a
    fresh solve that overwrites them.
    """
    penalty = parse_penalty(penalty_string)
    loss_path, seg_path = cache_paths(data_path, penalty_string)
    data = parse_bedgraph(data_path)
    if loss_path.exists() and seg_path.exists():
        try:
            return _load_cached(data, penalty, loss_path, seg_path)
        except (ValueError, OSError) as exc:
            warnings.warn(f"recomputing penalty={penalty_string}: "
                          f"cached results are inconsistent ({exc})")
    cfg = config if config is not None else SolveConfig(penalty=penalty)
    model, summary = solve(data, replace(cfg, penalty=penalty))
    write_loss(summary, loss_path)
    write_segments(model, seg_path)
    return model, summary


def _load_cached(data, penalty, loss_path, seg_path):
    summary = read_loss(loss_path)
    if summary.penalty != penalty:
        raise ValueError(f"cached penalty {summary.penalty} != requested {penalty}")
    if summary.bases != data.bases:
        raise ValueError(f"cached bases {summary.bases} != data bases {data.bases}")
    if summary.segments != 2 * summary.peaks + 1:
        raise ValueError("cached segment count does not match peak count")
    penalty_term = 0.0 if summary.peaks == 0 else penalty * summary.peaks
    objective = summary.total_loss + penalty_term
    if abs(summary.mean_pen_cost * summary.bases - objective) > \
            1e-6 * max(1.0, abs(objective)):
        raise ValueError("cached mean.pen.cost does not match total.loss")

    rows = read_segments(seg_path)
    if len(rows) != summary.segments:
        raise ValueError(f"cached segments file has {len(rows)} rows, "
                         f"expected {summary.segments}")
    segments = []
    expected_start = int(data.starts[0])
    for k, (chrom, start, end, status, mean) in enumerate(rows):
        if chrom != data.chrom:
            raise ValueError(f"cached chrom {chrom!r} != data chrom {data.chrom!r}")
        want = BACKGROUND if k % 2 == 0 else PEAK
        if status != want:
            raise ValueError(f"cached segment {k} has status {status}, expected {want}")
        if start != expected_start:
            raise ValueError(f"cached segment {k} starts at {start}, "
                             f"expected {expected_start}")
        first = data.row_of_start(start)
        last = (data.n - 1 if end == int(data.ends[-1])
                else data.row_of_start(end) - 1)
        if last < first:
            raise ValueError(f"cached segment {k} is empty")
        segments.append(Segment(first, last, start, end, mean, status))
        expected_start = end
    if expected_start != int(data.ends[-1]):
        raise ValueError("cached segments do not cover the profile")
    model = SegmentModel(data.chrom, tuple(segments), penalty,
                         summary.equality_constraints)
    return model, summary
