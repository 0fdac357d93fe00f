"""Unit and property tests for the piecewise cost calculus."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from updownseg.piecewise import (
    EQUALITY,
    Piece,
    PiecewiseCost,
    add,
    add_constant,
    arg_min,
    evaluate,
    find_mean,
    min_less,
    min_more,
    min_of_two,
    one_piece,
    simplify,
)

from conftest import grid_points, grid_values, min_from, min_upto, random_cost

LOG2 = math.log(2.0)


def manual_cost(triples, lo, hi):
    return PiecewiseCost([Piece(*s) for s in triples], lo, hi)


# ---------------------------------------------------------------- one_piece


def test_one_piece_coefficients():
    f = one_piece(2, 3, 0.0, 7.0)
    assert len(f.pieces) == 1
    p = f.pieces[0]
    assert p.alpha == 3.0
    assert p.beta == -6.0
    assert p.gamma == 0.0
    assert (p.min_mean, p.max_mean) == (0.0, 7.0)
    assert p.prev_end is None
    assert p.prev_mean == EQUALITY
    f.validate()


def test_one_piece_zero_count_has_no_log_term():
    f = one_piece(0, 2, 0.0, 5.0)
    assert f.pieces[0].beta == 0.0
    assert evaluate(f, 0.0) == 0.0
    assert evaluate(f, 3.0) == 6.0


def test_one_piece_rejects_bad_input():
    with pytest.raises(ValueError):
        one_piece(1, 0, 0.0, 4.0)
    with pytest.raises(ValueError):
        one_piece(-1, 1, 0.0, 4.0)
    with pytest.raises(ValueError):
        one_piece(1, 1, 4.0, 0.0)


# ----------------------------------------------------------------- evaluate


def test_evaluate_poisson_values():
    f = one_piece(2, 1, 0.0, 4.0)
    assert evaluate(f, 1.0) == 1.0
    assert evaluate(f, 2.0) == pytest.approx(2.0 - 2.0 * LOG2, abs=1e-15)
    assert evaluate(f, 0.0) == math.inf  # log term dominates at zero


def test_evaluate_domain_error():
    f = one_piece(1, 1, 0.0, 4.0)
    with pytest.raises(ValueError):
        evaluate(f, -0.5)
    with pytest.raises(ValueError):
        evaluate(f, 4.5)


def test_evaluate_left_piece_wins_at_shared_boundary():
    f = manual_cost([(0.0, 0.0, 1.0, 0.0, 2.0, None, EQUALITY),
                     (0.0, 0.0, 5.0, 2.0, 4.0, None, EQUALITY)], 0.0, 4.0)
    assert evaluate(f, 2.0) == 1.0


# ---------------------------------------------------------------------- add


def test_add_single_pieces():
    f = add(one_piece(1, 1, 0.0, 4.0), one_piece(5, 1, 0.0, 4.0))
    p = f.pieces[0]
    assert (p.alpha, p.beta, p.gamma) == (2.0, -6.0, 0.0)


def test_add_keeps_first_operand_pointers():
    f = min_less(9, one_piece(2, 1, 0.0, 4.0))
    g = one_piece(1, 1, 0.0, 4.0)
    h = add(f, g)
    assert all(p.prev_end == 9 for p in h.pieces)
    h2 = add(g, f)  # pointers now come from the plain data term
    assert all(p.prev_end is None for p in h2.pieces)


def test_add_refines_breakpoints(rng):
    for _ in range(50):
        f = random_cost(rng)
        g = random_cost(rng)
        h = add(f, g)
        h.validate()
        xs = grid_points(f)
        expect = grid_values(f, xs) + grid_values(g, xs)
        got = grid_values(h, xs)
        mask = np.isfinite(expect)
        assert np.allclose(got[mask], expect[mask], rtol=1e-12, atol=1e-12)
        assert np.all(np.isinf(got[~mask]))


def test_add_domain_mismatch():
    with pytest.raises(ValueError):
        add(one_piece(1, 1, 0.0, 4.0), one_piece(1, 1, 0.0, 5.0))


# ------------------------------------------------------------- add_constant


def test_add_constant_shifts_values():
    f = one_piece(3, 2, 0.0, 6.0)
    g = add_constant(f, 1.5)
    assert evaluate(g, 3.0) == pytest.approx(evaluate(f, 3.0) + 1.5, abs=1e-12)
    assert g.pieces[0].prev_end is None


def test_add_constant_rejects_bad_constant():
    f = one_piece(1, 1, 0.0, 4.0)
    with pytest.raises(ValueError):
        add_constant(f, -1.0)
    with pytest.raises(ValueError):
        add_constant(f, math.inf)


# --------------------------------------------------------------- min_of_two


def test_min_of_two_linear_crossing():
    f = manual_cost([(1.0, 0.0, 0.0, 0.5, 4.0, 3, EQUALITY)], 0.5, 4.0)
    g = manual_cost([(0.0, 0.0, 2.0, 0.5, 4.0, 8, EQUALITY)], 0.5, 4.0)
    h = min_of_two(f, g)
    h.validate()
    assert len(h.pieces) == 2
    assert h.pieces[0].max_mean == pytest.approx(2.0, abs=1e-9)
    assert h.pieces[0].prev_end == 3  # f below g left of the crossing
    assert h.pieces[1].prev_end == 8


def test_min_of_two_tie_prefers_second_operand():
    f = manual_cost([(1.0, -2.0, 0.0, 0.5, 4.0, 3, EQUALITY)], 0.5, 4.0)
    g = manual_cost([(1.0, -2.0, 0.0, 0.5, 4.0, 8, 1.25)], 0.5, 4.0)
    h = min_of_two(f, g)
    assert len(h.pieces) == 1
    assert h.pieces[0].prev_end == 8
    assert h.pieces[0].prev_mean == 1.25


def test_min_of_two_curved_crossing_residual():
    # piece with a log term against the constant equal to its value at 4:
    # crossings on both sides of the minimizer at 2
    c = 4.0 - 2.0 * math.log(4.0)
    f = manual_cost([(1.0, -2.0, 0.0, 0.5, 6.0, 1, EQUALITY)], 0.5, 6.0)
    g = manual_cost([(0.0, 0.0, c, 0.5, 6.0, 2, EQUALITY)], 0.5, 6.0)
    h = min_of_two(f, g)
    h.validate()
    assert len(h.pieces) == 3
    assert [p.prev_end for p in h.pieces] == [2, 1, 2]
    assert h.pieces[1].max_mean == pytest.approx(4.0, rel=1e-10)
    for boundary in (h.pieces[0].max_mean, h.pieces[1].max_mean):
        fv = evaluate(f, boundary)
        gv = evaluate(g, boundary)
        assert abs(fv - gv) <= 1e-8 * (1.0 + abs(fv))


def test_min_of_two_grid_oracle(rng):
    for _ in range(100):
        f = random_cost(rng)
        g = random_cost(rng)
        h = min_of_two(f, g)
        h.validate()
        xs = grid_points(f)
        expect = np.minimum(grid_values(f, xs), grid_values(g, xs))
        got = grid_values(h, xs)
        mask = np.isfinite(expect)
        scale = 1.0 + np.abs(expect[mask])
        assert np.all(np.abs(got[mask] - expect[mask]) <= 1e-9 * scale)


def test_min_of_two_new_boundary_residuals(rng):
    for _ in range(60):
        f = random_cost(rng)
        g = random_cost(rng)
        h = min_of_two(f, g)
        old = {p.max_mean for p in f.pieces} | {p.max_mean for p in g.pieces}
        for p in h.pieces[:-1]:
            b = p.max_mean
            if b in old:
                continue
            fv = evaluate(f, b)
            gv = evaluate(g, b)
            assert abs(fv - gv) <= 1e-8 * (1.0 + abs(fv))


# ----------------------------------------------------------------- min_less


def test_min_less_worked_example():
    f = manual_cost([(1.0, -2.0, 0.0, 0.5, 4.0, None, EQUALITY)], 0.5, 4.0)
    g = min_less(7, f)
    g.validate()
    assert len(g.pieces) == 2
    first, second = g.pieces
    assert (first.alpha, first.beta, first.gamma) == (1.0, -2.0, 0.0)
    assert (first.min_mean, first.max_mean) == (0.5, 2.0)
    assert first.prev_end == 7
    assert first.prev_mean == EQUALITY
    assert (second.alpha, second.beta) == (0.0, 0.0)
    assert second.gamma == pytest.approx(2.0 - 2.0 * LOG2, abs=1e-15)
    assert (second.min_mean, second.max_mean) == (2.0, 4.0)
    assert second.prev_end == 7
    assert second.prev_mean == 2.0


def test_min_less_of_nondecreasing_is_flat():
    f = one_piece(0, 2, 0.0, 5.0)  # 2*mu: increasing from 0
    g = min_less(4, f)
    assert len(g.pieces) == 1
    p = g.pieces[0]
    assert (p.alpha, p.beta, p.gamma) == (0.0, 0.0, 0.0)
    assert p.prev_mean == 0.0


def test_min_less_grid_oracle(rng):
    for _ in range(120):
        f = random_cost(rng)
        g = min_less(11, f)
        g.validate()
        xs = grid_points(f)
        for x in xs:
            expect = min_upto(f, float(x))
            got = evaluate(g, float(x))
            if math.isinf(expect):
                assert math.isinf(got)
            else:
                assert abs(got - expect) <= 1e-9 * (1.0 + abs(expect))


def test_min_less_pointer_semantics(rng):
    for _ in range(40):
        f = random_cost(rng)
        g = min_less(17, f)
        for p in g.pieces:
            assert p.prev_end == 17
            if p.prev_mean != EQUALITY:
                # constant piece: prev_mean marks where the minimum is hit
                assert p.alpha == 0.0 and p.beta == 0.0
                v = evaluate(f, p.prev_mean)
                assert abs(v - p.gamma) <= 1e-9 * (1.0 + abs(v))


# ----------------------------------------------------------------- min_more


def test_min_more_worked_example():
    f = manual_cost([(1.0, -2.0, 0.0, 0.5, 4.0, None, EQUALITY)], 0.5, 4.0)
    g = min_more(3, f)
    g.validate()
    assert len(g.pieces) == 2
    first, second = g.pieces
    assert (first.alpha, first.beta) == (0.0, 0.0)
    assert first.gamma == pytest.approx(2.0 - 2.0 * LOG2, abs=1e-15)
    assert (first.min_mean, first.max_mean) == (0.5, 2.0)
    assert first.prev_end == 3
    assert first.prev_mean == 2.0
    assert (second.alpha, second.beta, second.gamma) == (1.0, -2.0, 0.0)
    assert (second.min_mean, second.max_mean) == (2.0, 4.0)
    assert second.prev_mean == EQUALITY


def test_min_more_grid_oracle(rng):
    for _ in range(120):
        f = random_cost(rng)
        g = min_more(6, f)
        g.validate()
        xs = grid_points(f)
        for x in xs:
            expect = min_from(f, float(x))
            got = evaluate(g, float(x))
            assert abs(got - expect) <= 1e-9 * (1.0 + abs(expect))


def test_min_more_pointer_semantics(rng):
    for _ in range(40):
        f = random_cost(rng)
        g = min_more(23, f)
        for p in g.pieces:
            assert p.prev_end == 23
            if p.prev_mean != EQUALITY:
                assert p.alpha == 0.0 and p.beta == 0.0
                v = evaluate(f, p.prev_mean)
                assert abs(v - p.gamma) <= 1e-9 * (1.0 + abs(v))


# ------------------------------------------------------------------ arg_min


def test_arg_min_interior():
    f = one_piece(2, 1, 0.0, 4.0)
    r = arg_min(f)
    assert r.mean == 2.0
    assert r.cost == pytest.approx(2.0 - 2.0 * LOG2, abs=1e-15)
    assert r.prev_end is None
    assert r.prev_mean == EQUALITY


def test_arg_min_clips_to_domain():
    f = one_piece(9, 1, 0.0, 4.0)  # unconstrained minimizer at 9
    r = arg_min(f)
    assert r.mean == 4.0


def test_arg_min_constant_tie_is_leftmost():
    f = manual_cost([(0.0, 0.0, 1.0, 0.0, 2.0, 4, EQUALITY),
                     (0.0, 0.0, 1.0, 2.0, 5.0, 9, EQUALITY)], 0.0, 5.0)
    r = arg_min(f)
    assert r.mean == 0.0
    assert r.prev_end == 4


def test_arg_min_grid_oracle(rng):
    for _ in range(100):
        f = random_cost(rng)
        r = arg_min(f)
        xs = grid_points(f, 801)
        vals = grid_values(f, xs)
        finite = vals[np.isfinite(vals)]
        assert r.cost <= finite.min() + 1e-12 * (1.0 + abs(finite.min()))
        assert abs(evaluate(f, r.mean) - r.cost) <= 1e-9 * (1.0 + abs(r.cost))


# ---------------------------------------------------------------- find_mean


def test_find_mean_lookup():
    f = manual_cost([(1.0, -2.0, 0.0, 0.5, 2.0, 7, EQUALITY),
                     (0.0, 0.0, 0.6, 2.0, 4.0, 7, 2.0)], 0.5, 4.0)
    assert find_mean(f, 1.0) == (7, EQUALITY)
    assert find_mean(f, 3.0) == (7, 2.0)


def test_find_mean_boundary_prefers_left_piece():
    f = manual_cost([(1.0, 0.0, 0.0, 0.0, 2.0, 1, EQUALITY),
                     (0.0, 0.0, 2.0, 2.0, 4.0, 2, 2.0)], 0.0, 4.0)
    assert find_mean(f, 2.0) == (1, EQUALITY)
    # a hair past the boundary still resolves left, within tolerance
    assert find_mean(f, 2.0 + 5e-11) == (1, EQUALITY)
    assert find_mean(f, 2.0 + 1e-6) == (2, 2.0)


def test_find_mean_outside_domain():
    f = one_piece(1, 1, 0.0, 4.0)
    with pytest.raises(ValueError):
        find_mean(f, 5.0)
    with pytest.raises(ValueError):
        find_mean(f, -1.0)


# ----------------------------------------------------------------- simplify


def test_simplify_merges_equal_neighbours():
    f = manual_cost([(1.0, -2.0, 0.0, 0.0, 2.0, 4, EQUALITY),
                     (1.0, -2.0, 1e-13, 2.0, 5.0, 4, EQUALITY)], 0.0, 5.0)
    g = simplify(f)
    assert len(g.pieces) == 1
    assert (g.pieces[0].min_mean, g.pieces[0].max_mean) == (0.0, 5.0)


def test_simplify_keeps_different_pointers():
    f = manual_cost([(1.0, -2.0, 0.0, 0.0, 2.0, 4, EQUALITY),
                     (1.0, -2.0, 0.0, 2.0, 5.0, 5, EQUALITY)], 0.0, 5.0)
    assert len(simplify(f).pieces) == 2


def test_simplify_preserves_values(rng):
    for _ in range(60):
        f = random_cost(rng)
        g = simplify(f)
        g.validate()
        assert len(g.pieces) <= len(f.pieces)
        xs = grid_points(f)
        fv = grid_values(f, xs)
        gv = grid_values(g, xs)
        mask = np.isfinite(fv)
        assert np.all(np.abs(gv[mask] - fv[mask]) <=
                      1e-9 * (1.0 + np.abs(fv[mask])))


# ------------------------------------------------------- hypothesis strategy


@st.composite
def cost_functions(draw):
    hi = float(draw(st.integers(min_value=2, max_value=9)))

    def term():
        z = draw(st.integers(min_value=0, max_value=int(hi)))
        w = draw(st.integers(min_value=1, max_value=3))
        return one_piece(z, w, 0.0, hi)

    f = term()
    for _ in range(draw(st.integers(min_value=0, max_value=5))):
        op = draw(st.integers(min_value=0, max_value=4))
        if op == 0:
            f = add(f, term())
        elif op == 1:
            shift = draw(st.integers(min_value=0, max_value=6)) / 2.0
            f = min_of_two(f, add_constant(term(), shift))
        elif op == 2:
            f = min_less(draw(st.integers(min_value=0, max_value=50)), f)
        elif op == 3:
            f = min_more(draw(st.integers(min_value=0, max_value=50)), f)
        else:
            f = add_constant(f, draw(st.integers(min_value=0, max_value=4)) / 2.0)
    return f


@settings(max_examples=80, deadline=None)
@given(cost_functions())
def test_structure_invariant(f):
    f.validate()
    for p in f.pieces:
        assert p.alpha >= 0.0
        assert p.beta <= 0.0


@settings(max_examples=80, deadline=None)
@given(cost_functions())
def test_min_less_is_nonincreasing_and_below(f):
    g = min_less(1, f)
    g.validate()
    xs = grid_points(f, 101)
    gv = grid_values(g, xs)
    fv = grid_values(f, xs)
    finite = np.isfinite(gv)
    assert np.all(np.diff(gv[finite]) <= 1e-9 * (1.0 + np.abs(gv[finite][:-1])))
    both = finite & np.isfinite(fv)
    assert np.all(gv[both] <= fv[both] + 1e-9 * (1.0 + np.abs(fv[both])))


@settings(max_examples=80, deadline=None)
@given(cost_functions())
def test_min_more_is_nondecreasing_and_below(f):
    g = min_more(1, f)
    g.validate()
    xs = grid_points(f, 101)
    gv = grid_values(g, xs)
    fv = grid_values(f, xs)
    assert np.all(np.diff(gv) >= -1e-9 * (1.0 + np.abs(gv[:-1])))
    assert np.all(gv <= fv + 1e-9 * (1.0 + np.abs(fv)))


@settings(max_examples=60, deadline=None)
@given(cost_functions(), cost_functions())
def test_min_of_two_attains_an_operand(f, g):
    if f.domain_max != g.domain_max:
        g = one_piece(1, 1, f.domain_min, f.domain_max)
    h = min_of_two(f, g)
    h.validate()
    for x in grid_points(f, 53):
        x = float(x)
        hv = evaluate(h, x)
        fv = evaluate(f, x)
        gv = evaluate(g, x)
        lo = min(fv, gv)
        if math.isinf(lo):
            assert math.isinf(hv)
        else:
            assert abs(hv - lo) <= 1e-9 * (1.0 + abs(lo))


@settings(max_examples=60, deadline=None)
@given(cost_functions())
def test_running_minima_idempotent(f):
    g = min_less(1, f)
    gg = min_less(1, g)
    for x in grid_points(f, 101):
        a = evaluate(g, float(x))
        b = evaluate(gg, float(x))
        if math.isinf(a):
            assert math.isinf(b)
        else:
            assert abs(a - b) <= 1e-12 * (1.0 + abs(a))
