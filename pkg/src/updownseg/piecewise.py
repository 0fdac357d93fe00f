"""Exact calculus on piecewise functions of the mean, alpha*mu + beta*log(mu) + gamma.

Cost-to-come functions of the constrained segmentation recursion are
piecewise functions of the candidate segment mean ``mu`` on a closed
domain ``[domain_min, domain_max]`` (the data's count range).  Every
piece produced from Poisson count data has ``alpha >= 0`` and
``beta <= 0``, so each piece is convex with derivative
``alpha + beta/mu`` increasing in ``mu``; the minimum and
running-minimum operators below rely on that shape.

Pieces carry two back-pointers used when decoding a fitted model:
``prev_end`` is the last data row of the previous segment (``None``
before the first segment) and ``prev_mean`` is that segment's mean.
``prev_mean`` is the :data:`EQUALITY` sentinel when the adjacent-mean
inequality is active, i.e. the previous mean equals the current one.

All operators are pure: they never mutate their inputs and return
freshly built functions, so values may be shared freely across threads.
"""

from __future__ import annotations

import math
from typing import NamedTuple

EQUALITY = math.inf
"""``prev_mean`` sentinel: previous segment mean equals the current mean."""

ROOT_RTOL = 1e-12
"""Relative tolerance (in mu) for crossing-point refinement."""

BOUNDARY_ATOL = 1e-10
"""Absolute slack when locating a mean inside a function's pieces."""

_SNAP = 1e-12
"""Crossings within this relative distance of a breakpoint are dropped."""

_SIMPLIFY_ATOL = 1e-12
"""Coefficient tolerance for merging adjacent pieces in :func:`simplify`."""


class Piece:
    """One piece ``alpha*mu + beta*log(mu) + gamma`` on ``[min_mean, max_mean]``."""

    __slots__ = ("alpha", "beta", "gamma", "min_mean", "max_mean", "prev_end", "prev_mean")

    def __init__(self, alpha, beta, gamma, min_mean, max_mean,
                 prev_end=None, prev_mean=EQUALITY):
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.min_mean = min_mean
        self.max_mean = max_mean
        self.prev_end = prev_end
        self.prev_mean = prev_mean

    def value(self, mu):
        """Evaluate this piece at ``mu`` (limit convention at ``mu == 0``)."""
        return _limit_value(self.alpha, self.beta, self.gamma, mu)

    def __repr__(self):
        return (f"Piece({self.alpha:g}*mu{self.beta:+g}*log(mu){self.gamma:+g} "
                f"on [{self.min_mean:g},{self.max_mean:g}] "
                f"prev_end={self.prev_end} prev_mean={self.prev_mean})")


class PiecewiseCost:
    """An ordered, contiguous list of :class:`Piece` covering the mean domain."""

    __slots__ = ("pieces", "domain_min", "domain_max")

    def __init__(self, pieces, domain_min, domain_max):
        self.pieces = pieces
        self.domain_min = domain_min
        self.domain_max = domain_max

    def __len__(self):
        return len(self.pieces)

    def __repr__(self):
        return (f"PiecewiseCost({len(self.pieces)} pieces on "
                f"[{self.domain_min:g},{self.domain_max:g}])")

    def validate(self):
        """Raise ``ValueError`` unless pieces tile the domain in order."""
        pieces = self.pieces
        if not pieces:
            raise ValueError("piecewise function has no pieces")
        if pieces[0].min_mean != self.domain_min:
            raise ValueError("first piece does not start at domain_min")
        if pieces[-1].max_mean != self.domain_max:
            raise ValueError("last piece does not end at domain_max")
        prev_hi = None
        for p in pieces:
            if not p.min_mean < p.max_mean:
                raise ValueError(f"piece with empty interval: {p!r}")
            if prev_hi is not None and p.min_mean != prev_hi:
                raise ValueError(f"gap or overlap before {p!r}")
            prev_hi = p.max_mean


class ArgMinResult(NamedTuple):
    mean: float
    cost: float
    prev_end: int | None
    prev_mean: float


def _limit_value(alpha, beta, gamma, mu):
    # Value at mu, with the limit convention at mu == 0: the log term
    # dominates (+inf) unless beta == 0, in which case the limit is gamma.
    if mu <= 0.0:
        return gamma if beta == 0.0 else math.inf
    if beta == 0.0:
        return alpha * mu + gamma
    return alpha * mu + beta * math.log(mu) + gamma


def _diff_limit(da, db, dg, mu):
    # Same limit convention for a difference of two pieces; the result may
    # be +-inf, which is only ever used for its sign.
    if mu <= 0.0:
        if db == 0.0:
            return dg
        return math.inf if db < 0.0 else -math.inf
    if db == 0.0:
        return da * mu + dg
    return da * mu + db * math.log(mu) + dg


def _refine_root(da, db, dg, lo, hi, flo, fhi):
    """Locate the single root of ``da*mu + db*log(mu) + dg`` in ``(lo, hi)``.

    The bracket must be sign-changing (``flo`` and ``fhi`` of opposite
    sign; either may be infinite) and the difference monotone on it.
    Degenerate coefficient patterns are solved in closed form; otherwise
    Newton steps are taken with a bisection safeguard so the iterate can
    never leave the bracket.  Terminates at relative tolerance
    :data:`ROOT_RTOL` in ``mu``.
    """
    if db == 0.0:
        return -dg / da
    if da == 0.0:
        return math.exp(-dg / db)
    neg_lo = flo < 0.0
    a, b = lo, hi
    x = 0.5 * (a + b)
    for _ in range(80):
        fx = da * x + db * math.log(x) + dg
        if fx == 0.0:
            return x
        if (fx < 0.0) == neg_lo:
            a = x
        else:
            b = x
        deriv = da + db / x
        if deriv != 0.0:
            nx = x - fx / deriv
            if not (a < nx < b):
                nx = 0.5 * (a + b)
        else:
            nx = 0.5 * (a + b)
        if abs(nx - x) <= ROOT_RTOL * (abs(x) + 1e-300):
            return nx
        x = nx
    return x


def _push(pieces, alpha, beta, gamma, lo, hi, prev_end, prev_mean):
    # Append a piece, merging with the previous one when coefficients and
    # pointers match exactly; zero-width intervals are dropped.
    if hi <= lo:
        return
    if pieces:
        last = pieces[-1]
        if (last.max_mean == lo and last.alpha == alpha and last.beta == beta
                and last.gamma == gamma and last.prev_end == prev_end
                and last.prev_mean == prev_mean):
            last.max_mean = hi
            return
    pieces.append(Piece(alpha, beta, gamma, lo, hi, prev_end, prev_mean))


def _push_left(pieces, alpha, beta, gamma, lo, hi, prev_end, prev_mean):
    # Mirror of _push for lists built right-to-left (pieces[-1] lies to
    # the right of the incoming piece).
    if hi <= lo:
        return
    if pieces:
        last = pieces[-1]
        if (last.min_mean == hi and last.alpha == alpha and last.beta == beta
                and last.gamma == gamma and last.prev_end == prev_end
                and last.prev_mean == prev_mean):
            last.min_mean = lo
            return
    pieces.append(Piece(alpha, beta, gamma, lo, hi, prev_end, prev_mean))


def _require_same_domain(f, g):
    if f.domain_min != g.domain_min or f.domain_max != g.domain_max:
        raise ValueError(
            f"domain mismatch: [{f.domain_min}, {f.domain_max}] vs "
            f"[{g.domain_min}, {g.domain_max}]")


def one_piece(count, weight, domain_min, domain_max):
    """Weighted Poisson data term ``weight*(mu - count*log(mu))`` as one piece.

    ``count`` is the observed count and ``weight`` the number of bases it
    covers, so ``alpha = weight`` and ``beta = -weight*count``.
    """
    if domain_min > domain_max:
        raise ValueError(f"empty mean domain [{domain_min}, {domain_max}]")
    if weight < 1:
        raise ValueError(f"weight must be >= 1, got {weight}")
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    w = float(weight)
    piece = Piece(w, -w * float(count), 0.0, float(domain_min), float(domain_max))
    return PiecewiseCost([piece], float(domain_min), float(domain_max))


def evaluate(f, mu):
    """Value of ``f`` at ``mu``; the left piece wins at a shared boundary."""
    if mu < f.domain_min or mu > f.domain_max:
        raise ValueError(f"mean {mu} outside domain [{f.domain_min}, {f.domain_max}]")
    for p in f.pieces:
        if mu <= p.max_mean:
            return _limit_value(p.alpha, p.beta, p.gamma, mu)
    last = f.pieces[-1]
    return _limit_value(last.alpha, last.beta, last.gamma, mu)


def add(f, g):
    """Pointwise sum on the common refinement; pointers come from ``f``.

    ``f`` is the accumulated cost-to-come (whose decoding pointers must
    survive) and ``g`` is typically a single-piece data term.
    """
    _require_same_domain(f, g)
    gp = g.pieces
    if len(gp) == 1:
        q = gp[0]
        qa, qb, qg = q.alpha, q.beta, q.gamma
        pieces = [Piece(p.alpha + qa, p.beta + qb, p.gamma + qg,
                        p.min_mean, p.max_mean, p.prev_end, p.prev_mean)
                  for p in f.pieces]
        return PiecewiseCost(pieces, f.domain_min, f.domain_max)
    out = []
    fp = f.pieces
    nf, ng = len(fp), len(gp)
    fi = gi = 0
    lo = f.domain_min
    while fi < nf and gi < ng:
        pf = fp[fi]
        pg = gp[gi]
        hi = pf.max_mean if pf.max_mean <= pg.max_mean else pg.max_mean
        _push(out, pf.alpha + pg.alpha, pf.beta + pg.beta, pf.gamma + pg.gamma,
              lo, hi, pf.prev_end, pf.prev_mean)
        lo = hi
        if pf.max_mean == hi:
            fi += 1
        if pg.max_mean == hi:
            gi += 1
    return PiecewiseCost(out, f.domain_min, f.domain_max)


def add_constant(f, c):
    """Shift ``f`` upward by a finite constant ``c >= 0``."""
    if not c >= 0.0 or math.isinf(c):
        raise ValueError(f"constant must be finite and >= 0, got {c}")
    pieces = [Piece(p.alpha, p.beta, p.gamma + c, p.min_mean, p.max_mean,
                    p.prev_end, p.prev_mean)
              for p in f.pieces]
    return PiecewiseCost(pieces, f.domain_min, f.domain_max)


def _emit_lower(out, pf, pg, lo, hi):
    # Append min(pf, pg) restricted to [lo, hi].  Exact ties go to pg, the
    # second operand.
    da = pf.alpha - pg.alpha
    db = pf.beta - pg.beta
    dg = pf.gamma - pg.gamma
    if da == 0.0 and db == 0.0:
        src = pf if dg < 0.0 else pg
        _push(out, src.alpha, src.beta, src.gamma, lo, hi, src.prev_end, src.prev_mean)
        return
    cuts = []
    dlo = _diff_limit(da, db, dg, lo)
    dhi = _diff_limit(da, db, dg, hi)
    if da != 0.0 and db != 0.0:
        # The difference has one interior stationary point at -db/da (when
        # positive); split there so each sub-bracket is monotone.
        mu_c = -db / da
        if lo < mu_c < hi:
            dc = da * mu_c + db * math.log(mu_c) + dg
            _maybe_root(cuts, da, db, dg, lo, mu_c, dlo, dc)
            _maybe_root(cuts, da, db, dg, mu_c, hi, dc, dhi)
        else:
            _maybe_root(cuts, da, db, dg, lo, hi, dlo, dhi)
    else:
        _maybe_root(cuts, da, db, dg, lo, hi, dlo, dhi)
    a = lo
    for b in (*cuts, hi):
        if b > a:
            mid = 0.5 * (a + b)
            dmid = _diff_limit(da, db, dg, mid)
            src = pf if dmid < 0.0 else pg
            _push(out, src.alpha, src.beta, src.gamma, a, b, src.prev_end, src.prev_mean)
            a = b


def _maybe_root(cuts, da, db, dg, a, b, fa, fb):
    # Record a sign crossing strictly inside (a, b); crossings pinned to a
    # breakpoint (within _SNAP relative) do not create a new boundary.
    if fa == 0.0 or fb == 0.0:
        return
    if (fa < 0.0) == (fb < 0.0):
        return
    r = _refine_root(da, db, dg, a, b, fa, fb)
    snap = _SNAP * (abs(a) + abs(b) + 1.0)
    if r <= a + snap or r >= b - snap:
        return
    cuts.append(r)


def min_of_two(f, g):
    """Pointwise minimum of ``f`` and ``g``; ties prefer ``g``'s pieces."""
    _require_same_domain(f, g)
    out = []
    fp, gp = f.pieces, g.pieces
    nf, ng = len(fp), len(gp)
    fi = gi = 0
    lo = f.domain_min
    while fi < nf and gi < ng:
        pf = fp[fi]
        pg = gp[gi]
        hi = pf.max_mean if pf.max_mean <= pg.max_mean else pg.max_mean
        if hi > lo:
            _emit_lower(out, pf, pg, lo, hi)
            lo = hi
        if pf.max_mean == hi:
            fi += 1
        if pg.max_mean == hi:
            gi += 1
    return PiecewiseCost(out, f.domain_min, f.domain_max)


def _piece_min_location(alpha, beta, lo, hi):
    # Argmin of one convex piece on [lo, hi].
    if beta < 0.0:
        if alpha > 0.0:
            m = -beta / alpha
            if m < lo:
                return lo
            if m > hi:
                return hi
            return m
        return hi  # pure -log: decreasing
    return lo  # linear or constant: non-decreasing


def min_less(t, f):
    """Running minimum from the left: ``g(mu) = min(f(x) for x <= mu)``.

    The result alternates copies of ``f``'s strictly decreasing runs
    (pointer ``prev_mean = EQUALITY``) with constant pieces pinned at the
    best value seen so far (pointer ``prev_mean`` = the mean where that
    minimum is attained).  Every output piece gets ``prev_end = t``.
    """
    out = []
    best = math.inf
    best_at = f.domain_min
    for p in f.pieces:
        lo, hi = p.min_mean, p.max_mean
        a_, b_, g_ = p.alpha, p.beta, p.gamma
        m = _piece_min_location(a_, b_, lo, hi)
        if m > lo:
            # decreasing run [lo, m]
            vlo = _limit_value(a_, b_, g_, lo)
            vm = _limit_value(a_, b_, g_, m)
            if vlo <= best:
                _push(out, a_, b_, g_, lo, m, t, EQUALITY)
            elif vm >= best:
                _push(out, 0.0, 0.0, best, lo, m, t, best_at)
            else:
                r = _refine_root(a_, b_, g_ - best, lo, m, vlo - best, vm - best)
                snap = _SNAP * (abs(lo) + abs(m) + 1.0)
                if r <= lo + snap:
                    _push(out, a_, b_, g_, lo, m, t, EQUALITY)
                elif r >= m - snap:
                    _push(out, 0.0, 0.0, best, lo, m, t, best_at)
                else:
                    _push(out, 0.0, 0.0, best, lo, r, t, best_at)
                    _push(out, a_, b_, g_, r, m, t, EQUALITY)
            if vm < best:
                best = vm
                best_at = m
        if hi > m:
            # non-decreasing run [m, hi]: the running minimum is flat
            vm = _limit_value(a_, b_, g_, m)
            if vm < best:
                best = vm
                best_at = m
            _push(out, 0.0, 0.0, best, m, hi, t, best_at)
    return PiecewiseCost(out, f.domain_min, f.domain_max)


def min_more(t, f):
    """Running minimum from the right: ``g(mu) = min(f(x) for x >= mu)``.

    Mirror image of :func:`min_less`: strictly increasing runs of ``f``
    are copied with ``prev_mean = EQUALITY``; elsewhere the result is the
    constant best-to-the-right with ``prev_mean`` at its attainment.
    """
    rev = []
    best = math.inf
    best_at = f.domain_max
    for p in reversed(f.pieces):
        lo, hi = p.min_mean, p.max_mean
        a_, b_, g_ = p.alpha, p.beta, p.gamma
        if b_ < 0.0:
            m = _piece_min_location(a_, b_, lo, hi)
        elif a_ > 0.0:
            m = lo  # increasing everywhere
        else:
            m = hi  # constant piece: treated as a flat run on [lo, hi]
        if hi > m:
            # increasing run [m, hi]
            vhi = _limit_value(a_, b_, g_, hi)
            vm = _limit_value(a_, b_, g_, m)
            if vhi <= best:
                _push_left(rev, a_, b_, g_, m, hi, t, EQUALITY)
            elif vm >= best:
                _push_left(rev, 0.0, 0.0, best, m, hi, t, best_at)
            else:
                r = _refine_root(a_, b_, g_ - best, m, hi, vm - best, vhi - best)
                snap = _SNAP * (abs(m) + abs(hi) + 1.0)
                if r >= hi - snap:
                    _push_left(rev, a_, b_, g_, m, hi, t, EQUALITY)
                elif r <= m + snap:
                    _push_left(rev, 0.0, 0.0, best, m, hi, t, best_at)
                else:
                    _push_left(rev, 0.0, 0.0, best, r, hi, t, best_at)
                    _push_left(rev, a_, b_, g_, m, r, t, EQUALITY)
            if vm < best:
                best = vm
                best_at = m
        if m > lo:
            # f only falls toward m from the left, so the minimum over
            # x >= mu is flat on [lo, m]
            vm = _limit_value(a_, b_, g_, m)
            if vm < best:
                best = vm
                best_at = m
            _push_left(rev, 0.0, 0.0, best, lo, m, t, best_at)
    rev.reverse()
    return PiecewiseCost(rev, f.domain_min, f.domain_max)


def arg_min(f):
    """Global minimizer of ``f``; ties resolve to the leftmost piece."""
    best_cost = math.inf
    best_mean = f.domain_min
    best_piece = None
    for p in f.pieces:
        m = _piece_min_location(p.alpha, p.beta, p.min_mean, p.max_mean)
        c = _limit_value(p.alpha, p.beta, p.gamma, m)
        if c < best_cost:
            best_cost = c
            best_mean = m
            best_piece = p
    if best_piece is None:
        # every piece is +inf at its minimizer (all-zero domain edge case)
        p = f.pieces[0]
        return ArgMinResult(p.min_mean, math.inf, p.prev_end, p.prev_mean)
    return ArgMinResult(best_mean, best_cost, best_piece.prev_end, best_piece.prev_mean)


def find_mean(f, mu):
    """Back-pointers of the leftmost piece whose interval contains ``mu``.

    Piece intervals are widened by :data:`BOUNDARY_ATOL` so a mean that
    sits on a boundary up to rounding still resolves.
    """
    if mu < f.domain_min - BOUNDARY_ATOL or mu > f.domain_max + BOUNDARY_ATOL:
        raise ValueError(f"mean {mu} outside domain [{f.domain_min}, {f.domain_max}]")
    for p in f.pieces:
        if p.min_mean - BOUNDARY_ATOL <= mu <= p.max_mean + BOUNDARY_ATOL:
            return p.prev_end, p.prev_mean
    raise ValueError(f"mean {mu} not covered by any piece")


def simplify(f, atol=_SIMPLIFY_ATOL):
    """Merge adjacent pieces with near-identical coefficients and pointers.

    Coefficients must agree within ``atol`` absolutely and the back-pointers
    exactly; the surviving piece keeps the left neighbour's coefficients.
    """
    pieces = f.pieces
    if len(pieces) < 2:
        return f
    out = []
    for p in pieces:
        if out:
            last = out[-1]
            if (last.prev_end == p.prev_end and last.prev_mean == p.prev_mean
                    and abs(last.alpha - p.alpha) <= atol
                    and abs(last.beta - p.beta) <= atol
                    and abs(last.gamma - p.gamma) <= atol):
                last.max_mean = p.max_mean
                continue
        out.append(Piece(p.alpha, p.beta, p.gamma, p.min_mean, p.max_mean,
                         p.prev_end, p.prev_mean))
    if len(out) == len(pieces):
        return f
    return PiecewiseCost(out, f.domain_min, f.domain_max)
