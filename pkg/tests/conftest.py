"""Shared helpers: random cost functions and independent grid oracles."""

import math

import numpy as np
import pytest

from updownseg import piecewise as pw


def grid_points(f, count=257):
    return np.linspace(f.domain_min, f.domain_max, count)


def grid_values(f, xs):
    return np.array([pw.evaluate(f, float(x)) for x in xs])


def piece_argmin(p, lo, hi):
    # Independent per-piece minimizer formula (duplicated on purpose so
    # the test oracle does not share code with the implementation).
    if p.beta < 0.0:
        if p.alpha > 0.0:
            m = -p.beta / p.alpha
            return min(max(m, lo), hi)
        return hi
    return lo


def min_upto(f, x):
    """min of f over [domain_min, x], by scanning pieces."""
    best = math.inf
    for p in f.pieces:
        if p.min_mean > x:
            break
        hi = min(p.max_mean, x)
        m = piece_argmin(p, p.min_mean, hi)
        v = p.value(m)
        if v < best:
            best = v
    return best


def min_from(f, x):
    """min of f over [x, domain_max], by scanning pieces."""
    best = math.inf
    for p in f.pieces:
        if p.max_mean < x:
            continue
        lo = max(p.min_mean, x)
        m = piece_argmin(p, lo, p.max_mean)
        v = p.value(m)
        if v < best:
            best = v
    return best


def random_cost(rng, domain_max=8.0, n_ops=6):
    """A structurally valid random cost built the way the solver builds them."""
    hi = float(domain_max)

    def term():
        return pw.one_piece(int(rng.integers(0, int(hi) + 1)),
                            int(rng.integers(1, 4)), 0.0, hi)

    f = term()
    for _ in range(n_ops):
        op = int(rng.integers(0, 5))
        if op == 0:
            f = pw.add(f, term())
        elif op == 1:
            f = pw.min_of_two(f, pw.add_constant(term(), float(rng.uniform(0, 3))))
        elif op == 2:
            f = pw.min_less(int(rng.integers(0, 100)), f)
        elif op == 3:
            f = pw.min_more(int(rng.integers(0, 100)), f)
        else:
            f = pw.add_constant(f, float(rng.uniform(0, 2)))
    return f


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
