import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import brute_force_spread, tiny_graph
from imbench.diffusion import (SpreadEstimate, WorldSpread, estimate_spread, sample_sd,
                               simulate_cascade, spread_samples)
from imbench.errors import ResourceCapError
from imbench.exact import ExactSpreadOracle, exact_spread
from imbench.graph import (CounterexampleLayout, UniformIC, WeightedGraph, assign_weights,
                           counterexample_graph, random_graph)
from imbench.rng import RngStream


def zero_graph(n=10, m=30):
    return assign_weights(random_graph(n, m, RngStream(1)), UniformIC(0.0))


def cycle(n, p=1.0):
    return WeightedGraph(n, np.arange(n), (np.arange(n) + 1) % n, np.full(n, p))


# ---- simulate_cascade


@pytest.mark.parametrize("model", ["IC", "LT"])
def test_no_propagation_with_zero_probabilities(model):
    g = zero_graph()
    assert simulate_cascade(g, model, [0, 3, 5], RngStream(1)) == 3


def test_two_clique_spread_is_two():
    g = counterexample_graph(2)
    x = CounterexampleLayout(2).clique(0)[0]
    assert simulate_cascade(g, "IC", [x], RngStream(4)) == 2


@pytest.mark.parametrize("model", ["IC", "LT"])
def test_strongly_connected_all_p1(model):
    g = cycle(7)
    assert simulate_cascade(g, model, [3], RngStream(9)) == 7


@pytest.mark.parametrize("seeds", [[-1], [10], [1, 1]])
def test_invalid_seeds_rejected(seeds):
    with pytest.raises(ValueError):
        simulate_cascade(zero_graph(), "IC", seeds, RngStream(1))


def test_lt_requires_valid_weights():
    g = WeightedGraph(3, [0, 1], [2, 2], [0.7, 0.7])
    with pytest.raises(ValueError):
        simulate_cascade(g, "LT", [0], RngStream(1))


def test_unweighted_graph_rejected():
    with pytest.raises(ValueError):
        simulate_cascade(random_graph(5, 5, RngStream(1)), "IC", [0], RngStream(1))


def test_cascade_equals_round_of_estimate():
    g = assign_weights(random_graph(40, 160, RngStream(2)), UniformIC(0.2))
    parent = RngStream(11)
    samples = spread_samples(g, "IC", [0, 1], 20, parent)
    for i in (0, 7, 19):
        assert simulate_cascade(g, "IC", [0, 1], parent.child(i)) == samples[i]


@given(st.integers(0, 2**32), st.sampled_from(["IC", "LT"]))
def test_spread_at_least_seed_count(seed, model):
    g = tiny_graph(seed % 1000, 8, 14, lt=(model == "LT"))
    seeds = [0, 5]
    assert simulate_cascade(g, model, seeds, RngStream(seed)) >= len(seeds)


# ---- sample sd and estimate_spread


def test_sample_sd_two_points():
    assert sample_sd([0, 2]) == math.sqrt(2)


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=50))
def test_sample_sd_matches_definition(xs):
    mean = sum(xs) / len(xs)
    ref = math.sqrt(sum((x - mean) ** 2 for x in xs) / (len(xs) - 1))
    assert sample_sd(xs) == pytest.approx(ref, rel=1e-9, abs=1e-6)


def test_sample_sd_needs_two_samples():
    with pytest.raises(ValueError):
        sample_sd([1.0])


def test_estimate_all_zero_graph():
    est = estimate_spread(zero_graph(20, 60), "IC", [0, 1, 2, 3, 4], 1000, RngStream(3))
    assert (est.mean, est.sample_sd, est.rounds) == (5.0, 0.0, 1000)


def test_estimate_rejects_single_round():
    with pytest.raises(ValueError):
        estimate_spread(zero_graph(), "IC", [0], 1, RngStream(1))


def test_std_error():
    e = SpreadEstimate(3.0, 2.0, 100)
    assert e.std_error == 0.2


def test_counterexample_n10_estimate():
    g = counterexample_graph(10)
    est = estimate_spread(g, "IC", [0], 10_000, RngStream(12))
    assert abs(est.mean - 11) <= 3 * est.std_error
    assert abs(est.sample_sd - 10 * math.sqrt(0.95)) <= 0.05 * 10 * math.sqrt(0.95)


@pytest.mark.parametrize("model", ["IC", "LT"])
def test_deterministic_and_worker_independent(model):
    g = tiny_graph(3, 30, 90, lt=model == "LT")
    a = estimate_spread(g, model, [0, 1], 3000, RngStream(5))
    b = estimate_spread(g, model, [0, 1], 3000, RngStream(5))
    c = estimate_spread(g, model, [0, 1], 3000, RngStream(5), workers=4)
    assert a == b == c


@pytest.mark.parametrize("model", ["IC", "LT"])
@pytest.mark.parametrize("seed", range(6))
def test_estimate_consistent_with_exact(model, seed):
    g = tiny_graph(seed, 9, 14, lt=model == "LT")
    est = estimate_spread(g, model, [0], 10_000, RngStream(100 + seed))
    exact = exact_spread(g, model, [0])
    assert abs(est.mean - exact) <= 4 * max(est.std_error, 1e-12)


# ---- exact oracle against an independent brute force


def test_exact_isolated_node():
    g = WeightedGraph(3, [0], [1], [0.5])
    assert exact_spread(g, "IC", [2]) == 1.0


def test_exact_path_half():
    g = WeightedGraph(2, [0], [1], [0.5])
    assert exact_spread(g, "IC", [0]) == pytest.approx(1.5, abs=1e-12)
    assert exact_spread(g, "LT", [0]) == pytest.approx(1.5, abs=1e-12)


def test_exact_counterexample_subgadget():
    g = counterexample_graph(2)
    sub, _ = g.subgraph(range(CounterexampleLayout(2).gadget.stop))
    assert (sub.node_count, sub.arc_count) == (9, 8)
    assert exact_spread(sub, "IC", [0]) == pytest.approx(3.0, abs=1e-12)
    assert exact_spread(g, "IC", [0]) == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 5, 10])
def test_exact_counterexample_closed_form(n):
    assert exact_spread(counterexample_graph(n), "IC", [0]) == pytest.approx(1 + n, abs=1e-9)


@pytest.mark.parametrize("model", ["IC", "LT"])
@pytest.mark.parametrize("seed", range(15))
def test_exact_matches_brute_force(model, seed):
    g = tiny_graph(seed, 7, 10, lt=model == "LT")
    for seeds in ([0], [1, 4], [2, 3, 6]):
        ref = brute_force_spread(g, model, seeds)
        assert exact_spread(g, model, seeds) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("model", ["IC", "LT"])
def test_oracle_table_matches_exact(model):
    g = tiny_graph(4, 8, 12, lt=model == "LT")
    oracle = ExactSpreadOracle(g, model)
    for r in range(0, 4):
        for s in itertools.combinations(range(8), r):
            assert oracle(s) == pytest.approx(exact_spread(g, model, s), abs=1e-12)


def test_exact_cap_diagnostic():
    g = assign_weights(random_graph(12, 40, RngStream(1)), UniformIC(0.3))
    with pytest.raises(ResourceCapError, match="cap"):
        exact_spread(g, "IC", [0])


@pytest.mark.parametrize("model", ["IC", "LT"])
@given(seed=st.integers(0, 10_000), data=st.data())
def test_monotone_and_submodular(model, seed, data):
    g = tiny_graph(seed, 7, 10, lt=model == "LT")
    oracle = ExactSpreadOracle(g, model)
    t = data.draw(st.sets(st.integers(0, 6), max_size=4))
    s = data.draw(st.sets(st.sampled_from(sorted(t)), max_size=len(t))) if t else set()
    x = data.draw(st.integers(0, 6).filter(lambda v: v not in t)) if len(t) < 7 else None
    assert oracle(s) <= oracle(t) + 1e-12
    if x is not None:
        assert oracle(s | {x}) - oracle(s) >= oracle(t | {x}) - oracle(t) - 1e-12


# ---- common-world objective


@pytest.mark.parametrize("model", ["IC", "LT"])
@given(seed=st.integers(0, 10_000), data=st.data())
def test_world_spread_exactly_submodular(model, seed, data):
    g = tiny_graph(seed, 10, 25, lt=model == "LT")
    f = WorldSpread(g, model, 50, RngStream(seed))
    t = data.draw(st.sets(st.integers(0, 9), max_size=5))
    s = data.draw(st.sets(st.sampled_from(sorted(t)), max_size=len(t))) if t else set()
    x = data.draw(st.integers(0, 9))
    if x in t:
        return
    assert f(s) <= f(t)
    assert f(s | {x}) - f(s) >= f(t | {x}) - f(t)


def test_live_edge_lt_agrees_with_threshold_lt():
    g = tiny_graph(8, 9, 16, lt=True)
    exact = exact_spread(g, "LT", [0, 1])
    world = WorldSpread(g, "LT", 20_000, RngStream(3)).mean([0, 1])
    thresh = estimate_spread(g, "LT", [0, 1], 20_000, RngStream(4))
    assert abs(world - exact) <= 4 * thresh.std_error + 1e-9
    assert abs(thresh.mean - exact) <= 4 * thresh.std_error + 1e-9
