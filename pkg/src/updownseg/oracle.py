"""Exhaustive reference solver for small profiles.

Enumerates every odd-length changepoint vector and, for each, every
subset of active adjacent-mean equality constraints; pooled weighted
means give the optimal constrained fit for that configuration.  Slow by
design -- it exists to certify the dynamic-programming solver on small
inputs, so it shares no code with the fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

from .solver import (
    BACKGROUND,
    PEAK,
    Segment,
    SegmentModel,
    SolveConfig,
    segment_loss,
    solve,
)

MAX_ROWS = 14

LESS_EQUAL = "<="
GREATER_EQUAL = ">="


@dataclass(frozen=True)
class OracleResult:
    model: SegmentModel
    objective: float
    total_loss: float
    enumerated: int


def constrained_segment_fit(blocks, directions):
    """Best means for fixed segment blocks under alternating constraints.

    ``blocks`` is a list of ``(weighted_count_sum, weight_sum)`` pairs,
    one per segment; ``directions[k]`` (``"<="`` or ``">="``) constrains
    ``mean[k]`` against ``mean[k+1]``.  Every subset of constraints is
    tried as actively binding (adjacent blocks pooled); a candidate is
    kept only if its inactive constraints hold strictly.  Returns
    ``(means, loss)`` for the best feasible candidate.
    """
    k = len(blocks)
    if len(directions) != k - 1:
        raise ValueError(f"expected {k - 1} directions for {k} blocks")
    best_loss = math.inf
    best_means = None
    for mask in range(1 << (k - 1)):
        means = _pooled_means(blocks, mask)
        if not _strictly_feasible(means, directions, mask):
            continue
        loss = 0.0
        for (s, w), m in zip(blocks, means):
            loss += segment_loss(m, w, s)
        if loss < best_loss:
            best_loss = loss
            best_means = means
    if best_means is None:
        raise RuntimeError("no feasible constrained fit (inconsistent input)")
    return best_means, best_loss


def _pooled_means(blocks, mask):
    # Bit j of mask set => blocks j and j+1 share one pooled mean.
    k = len(blocks)
    means = [0.0] * k
    j = 0
    while j < k:
        s, w = blocks[j]
        end = j
        while end < k - 1 and mask >> end & 1:
            end += 1
            s += blocks[end][0]
            w += blocks[end][1]
        m = s / w
        for idx in range(j, end + 1):
            means[idx] = m
        j = end + 1
    return means


def _strictly_feasible(means, directions, mask):
    for j, d in enumerate(directions):
        if mask >> j & 1:
            continue
        if d == LESS_EQUAL:
            if not means[j] < means[j + 1]:
                return False
        elif not means[j] > means[j + 1]:
            return False
    return True


def brute_force_solve(data, penalty):
    """Globally optimal constrained model by exhaustive enumeration.

    Only profiles with at most :data:`MAX_ROWS` rows are accepted.  Ties
    in the penalized objective go to fewer segments, then to the
    lexicographically earliest changepoint vector.
    """
    n = data.n
    if n > MAX_ROWS:
        raise ValueError(f"oracle accepts at most {MAX_ROWS} rows, got {n}")
    penalty = float(penalty)
    if math.isnan(penalty) or penalty < 0.0:
        raise ValueError(f"penalty must be >= 0, got {penalty}")
    weights = [int(w) for w in data.weights]
    wz = [int(w) * int(z) for w, z in zip(data.weights, data.counts)]
    prefix_w = [0]
    prefix_s = [0]
    for w, s in zip(weights, wz):
        prefix_w.append(prefix_w[-1] + w)
        prefix_s.append(prefix_s[-1] + s)

    best = None  # (objective, changepoints, means)
    enumerated = 0
    for n_peaks in range(0, (n - 1) // 2 + 1):
        n_changes = 2 * n_peaks
        directions = [LESS_EQUAL if j % 2 == 0 else GREATER_EQUAL
                      for j in range(n_changes)]
        for cps in combinations(range(1, n), n_changes):
            enumerated += 1
            bounds = (0, *cps, n)
            blocks = [(prefix_s[b] - prefix_s[a], prefix_w[b] - prefix_w[a])
                      for a, b in zip(bounds[:-1], bounds[1:])]
            means, loss = constrained_segment_fit(blocks, directions)
            objective = loss if n_peaks == 0 else loss + penalty * n_peaks
            if best is None or objective < best[0]:
                best = (objective, cps, means)
    objective, cps, means = best
    bounds = (0, *cps, n)
    equality = sum(1 for a, b in zip(means[:-1], means[1:]) if a == b)
    segments = []
    for k, (a, b) in enumerate(zip(bounds[:-1], bounds[1:])):
        status = BACKGROUND if k % 2 == 0 else PEAK
        segments.append(Segment(a, b - 1, int(data.starts[a]),
                                int(data.ends[b - 1]), means[k], status))
    model = SegmentModel(data.chrom, tuple(segments), penalty, equality)
    total_loss = objective if not cps else objective - penalty * (len(cps) // 2)
    return OracleResult(model, objective, total_loss, enumerated)


def verify_against_oracle(data, penalty, rel_tol=1e-8, config=None):
    """Solve both ways and compare objectives; returns ``(ok, message)``.

    The fast solver's objective is checked along two routes: the raw
    dynamic-programming cost, and the loss recomputed from the decoded
    segments plus the penalty term.  Tied optima may decode different
    segmentations, so only objectives are compared.
    """
    cfg = config if config is not None else SolveConfig(penalty=penalty)
    model, summary = solve(data, replace(cfg, penalty=penalty))
    ref = brute_force_solve(data, penalty)
    scale = max(1.0, abs(ref.objective))
    problems = []
    if abs(summary.dp_cost - ref.objective) > rel_tol * scale:
        problems.append(f"dp objective {summary.dp_cost!r} != "
                        f"oracle {ref.objective!r}")
    penalty_term = 0.0 if summary.peaks == 0 else penalty * summary.peaks
    decoded = summary.total_loss + penalty_term
    if abs(decoded - ref.objective) > rel_tol * scale:
        problems.append(f"decoded objective {decoded!r} != "
                        f"oracle {ref.objective!r}")
    if problems:
        return False, "; ".join(problems)
    return True, (f"objective {ref.objective:.10g} with {summary.peaks} peaks "
                  f"({ref.enumerated} candidates)")
