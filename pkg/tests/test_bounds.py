import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multical import (
    ASTRONOMICAL,
    BoundParams,
    Infeasible,
    achievable_epsilon,
    binary_uc_bound,
    chernoff_absolute_tail,
    chernoff_relative_tail,
    finite_class_bound,
    graph_dim_bound,
    lower_bound,
    occupancy_threshold,
    subpopulation_coverage_bound,
)

# Frozen values, evaluated independently with mpmath at 50 digits.
EXAMPLE = BoundParams(epsilon=0.1, delta=0.1, gamma=0.2, psi=0.2, lam=0.25, card_gamma=4, card_h=16)
GRAPH = BoundParams(epsilon=0.2, delta=0.05, gamma=0.2, psi=0.2, card_gamma=5, card_y=4, d=10)


def test_finite_example():
    assert finite_class_bound(EXAMPLE) == 198545
    assert finite_class_bound(EXAMPLE, ceil=False) == pytest.approx(20000 * math.log(20480), rel=1e-14)


def test_finite_doubling_h_adds_log2():
    base = finite_class_bound(EXAMPLE, ceil=False)
    doubled = finite_class_bound(EXAMPLE.replace(card_h=32), ceil=False)
    assert doubled - base == pytest.approx(20000 * math.log(2), rel=1e-12)
    assert finite_class_bound(EXAMPLE.replace(card_h=32)) == math.ceil(20000 * math.log(40960))


def test_finite_halving_epsilon():
    base = finite_class_bound(EXAMPLE, ceil=False)
    assert finite_class_bound(EXAMPLE.replace(epsilon=0.05), ceil=False) == pytest.approx(4 * base, rel=1e-14)


def test_graph_example():
    assert graph_dim_bound(GRAPH) == 3198293
    assert graph_dim_bound(GRAPH, ceil=False) == pytest.approx(3198292.909, abs=1e-3)


def test_graph_scaling():
    base = graph_dim_bound(GRAPH, ceil=False)
    assert graph_dim_bound(GRAPH.replace(c_graph=128), ceil=False) == pytest.approx(2 * base, rel=1e-14)
    assert graph_dim_bound(GRAPH.replace(psi=0.1), ceil=False) == pytest.approx(4 * base, rel=1e-14)


def test_lower_bound_examples():
    unit = BoundParams(epsilon=1, delta=1 / math.e, gamma=1, psi=1)
    assert lower_bound(unit) == 1
    p = BoundParams(epsilon=0.1, delta=0.01, gamma=0.5, psi=0.5)
    assert lower_bound(p) == 1843
    assert lower_bound(p.replace(gamma=0.25), ceil=False) == pytest.approx(2 * lower_bound(p, ceil=False), rel=1e-14)


def test_lower_never_exceeds_finite_on_grid():
    grid = (0.05, 0.1, 0.2, 0.5, 1.0)
    for eps, delta, gamma, psi in itertools.product(grid, (0.01, 0.05, 0.1, 0.5), grid, grid):
        for lam, cg, ch in itertools.product((0.1, 0.5, 1.0), (1, 10), (1, 100)):
            p = BoundParams(epsilon=eps, delta=delta, gamma=gamma, psi=psi, lam=lam, card_gamma=cg, card_h=ch)
            assert lower_bound(p) <= finite_class_bound(p)


def test_coverage_examples():
    assert subpopulation_coverage_bound(0.5, 2 / math.e, 2) == 16
    assert subpopulation_coverage_bound(0.1, 0.05, 10) == 424
    assert subpopulation_coverage_bound(0.1, 0.05, 10, ceil=False) == pytest.approx(80 * math.log(200), rel=1e-14)
    a = subpopulation_coverage_bound(0.2, 0.05, 3, ceil=False)
    assert subpopulation_coverage_bound(0.1, 0.05, 3, ceil=False) == pytest.approx(2 * a, rel=1e-14)


def test_chernoff_examples():
    assert chernoff_absolute_tail(100, 0.2) == pytest.approx(6.7092525580502e-4, rel=1e-12)
    assert chernoff_absolute_tail(1, 1e-9) == 1.0
    assert chernoff_absolute_tail(1, 1e-9, clamp=False) == pytest.approx(2.0)
    for n, eps in [(10, 0.1), (50, 0.05), (7, 0.3)]:
        t = chernoff_absolute_tail(n, eps, clamp=False)
        assert chernoff_absolute_tail(2 * n, eps, clamp=False) == pytest.approx(t * t / 2, rel=1e-12)


def test_relative_examples():
    assert chernoff_relative_tail(0, 0.5) == 1.0
    assert chernoff_relative_tail(8, 0.5) == pytest.approx(0.36787944117144233, rel=1e-15)
    with pytest.raises(ValueError):
        chernoff_relative_tail(1, 1.0)


def test_binary_uc_examples():
    assert binary_uc_bound(0, 1.0, 1 / math.e) == 8
    assert binary_uc_bound(5, 0.1, 0.05) == 6397
    for d in (1, 3, 10):
        diff = binary_uc_bound(2 * d, 0.1, 0.05, ceil=False) - binary_uc_bound(d, 0.1, 0.05, ceil=False)
        assert diff == pytest.approx(8 * d / 0.01, rel=1e-12)


def test_occupancy_threshold():
    assert occupancy_threshold(EXAMPLE) == pytest.approx(200 * math.log(20480), rel=1e-14)


def test_astronomical():
    p = BoundParams(epsilon=1e-9, delta=1e-9, gamma=1e-9, psi=1e-9)
    assert finite_class_bound(p) is ASTRONOMICAL
    assert graph_dim_bound(p) is ASTRONOMICAL


def test_param_validation():
    with pytest.raises(ValueError):
        BoundParams(epsilon=0)
    with pytest.raises(ValueError):
        BoundParams(card_h=0)
    with pytest.raises(ValueError):
        BoundParams(c_graph=0)


unit = st.floats(0.01, 1.0)


@settings(max_examples=200, deadline=None)
@given(unit, unit, unit, unit, unit, st.sampled_from(["epsilon", "delta", "gamma", "psi", "lam"]))
def test_strictly_antitone(eps, delta, gamma, psi, lam, name):
    p = BoundParams(epsilon=eps, delta=min(delta, 0.99), gamma=gamma, psi=psi, lam=lam, card_gamma=3, card_h=5, d=2)
    v = getattr(p, name)
    if v <= 0.02:
        return
    q = p.replace(**{name: v / 2})
    assert finite_class_bound(q, ceil=False) > finite_class_bound(p, ceil=False)
    assert finite_class_bound(q) >= finite_class_bound(p)
    if name != "lam":
        assert graph_dim_bound(q, ceil=False) > graph_dim_bound(p, ceil=False)
        assert lower_bound(q, ceil=False) > lower_bound(p, ceil=False)


@settings(max_examples=200, deadline=None)
@given(unit, unit, st.sampled_from(["card_gamma", "card_h", "card_y", "d"]), st.integers(1, 50))
def test_isotone_in_counts(eps, gamma, name, k):
    p = BoundParams(epsilon=eps, gamma=gamma, psi=gamma, card_gamma=2, card_h=2, card_y=2, d=2)
    q = p.replace(**{name: getattr(p, name) + k})
    assert finite_class_bound(q) >= finite_class_bound(p)
    assert graph_dim_bound(q) >= graph_dim_bound(p)
    if name in ("card_gamma", "card_h"):
        assert finite_class_bound(q, ceil=False) > finite_class_bound(p, ceil=False)
    if name in ("card_gamma", "card_y", "d"):
        assert graph_dim_bound(q, ceil=False) > graph_dim_bound(p, ceil=False)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.05, 1.0), st.integers(1, 50), st.integers(1, 50))
def test_finite_round_trip(eps, gamma, ch, cg):
    p = BoundParams(epsilon=eps, gamma=gamma, psi=gamma, card_h=ch, card_gamma=cg)
    m = finite_class_bound(p)
    e = achievable_epsilon(m, p)
    assert e <= math.nextafter(eps, 2.0)
    assert finite_class_bound(p.replace(epsilon=e)) <= m
    lower = math.nextafter(e, 0.0)
    assert finite_class_bound(p.replace(epsilon=lower)) > m


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.1, 1.0), st.integers(0, 20))
def test_graph_round_trip(eps, gamma, d):
    p = BoundParams(epsilon=eps, gamma=gamma, psi=gamma, d=d, card_gamma=3, card_y=4)
    m = graph_dim_bound(p)
    e = achievable_epsilon(m, p, mode="graph")
    assert e <= eps + 1e-9
    assert graph_dim_bound(p.replace(epsilon=e)) <= m
    if e > 1e-6:
        assert graph_dim_bound(p.replace(epsilon=e - 1e-6)) > m


def test_infeasible():
    p = BoundParams(gamma=0.01, psi=0.01, card_h=1000)
    with pytest.raises(Infeasible):
        achievable_epsilon(1, p)
    with pytest.raises(Infeasible):
        achievable_epsilon(1, p, mode="graph")


def test_chernoff_dominates_simulation_small():
    rng = np.random.default_rng(0)
    for n, eps, mu in itertools.product((10, 100), (0.1, 0.2), (0.3, 0.5)):
        k = rng.binomial(n, mu, size=20_000)
        absolute = np.mean(np.abs(k - n * mu) >= n * eps)
        relative = np.mean(k <= (1 - eps) * n * mu)
        assert absolute <= chernoff_absolute_tail(n, eps)
        assert relative <= chernoff_relative_tail(n * mu, eps)
