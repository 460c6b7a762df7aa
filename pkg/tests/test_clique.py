import itertools

import numpy as np
import pytest

from lgidnc.channel import ChannelParams
from lgidnc.clique import (
    SearchTooLarge,
    Transmission,
    clique_to_transmission,
    clique_weight,
    exact_max_weight_clique,
    exhaustive_best_combination,
    greedy_max_weight_clique,
    is_clique,
    is_maximal,
)
from lgidnc.graph import build_gidnc_graph, build_lgidnc_graph
from lgidnc.probability import expected_total_delay, innovative_probability
from lgidnc.state import EntryState, FeedbackMatrix

import oracles
from conftest import AbstractGraph, random_graph, random_matrix, random_params, section4


def test_greedy_complete_graph_takes_everything():
    n = 5
    g = AbstractGraph(~np.eye(n, dtype=bool), [0.1, 0.5, 0.2, 0.9, 0.3])
    assert greedy_max_weight_clique(g) == tuple(range(n))


def test_greedy_isolated_vertices():
    g = AbstractGraph(np.zeros((2, 2), bool), [0.3, 0.7])
    assert greedy_max_weight_clique(g) == (1,)


def test_greedy_tie_goes_to_lowest_index():
    g = AbstractGraph(np.zeros((3, 3), bool), [0.5, 0.5, 0.5])
    assert greedy_max_weight_clique(g) == (0,)


def test_greedy_empty_graph():
    assert greedy_max_weight_clique(AbstractGraph(np.zeros((0, 0), bool), [])) == ()


def test_exact_single_vertex():
    assert exact_max_weight_clique(AbstractGraph(np.zeros((1, 1), bool), [0.4])) == (0,)


def test_exact_prefers_heavier_triangle():
    adj = np.zeros((4, 4), bool)
    for a, b in itertools.combinations(range(3), 2):
        adj[a, b] = adj[b, a] = True
    g = AbstractGraph(adj, [1.0, 1.0, 1.0, 2.5])
    assert exact_max_weight_clique(g) == (0, 1, 2)


def test_exact_refuses_large_graphs(rng):
    with pytest.raises(SearchTooLarge):
        exact_max_weight_clique(random_graph(rng, 21))
    exact_max_weight_clique(random_graph(rng, 21), cap=21)


def test_exact_matches_subset_enumeration(rng):
    for _ in range(500):
        g = random_graph(rng, 10)
        best_w, best = oracles.max_weight_clique_bruteforce(g.adjacency.tolist(), g.weights.tolist())
        got = exact_max_weight_clique(g)
        assert got == best
        assert clique_weight(g, got) == best_w


def test_greedy_is_valid_maximal_and_bounded(rng):
    for _ in range(1000):
        g = random_graph(rng, int(rng.integers(1, 13)))
        greedy = greedy_max_weight_clique(g)
        exact = exact_max_weight_clique(g)
        assert is_clique(g, greedy) and is_maximal(g, greedy)
        assert is_clique(g, exact)
        assert clique_weight(g, greedy) <= clique_weight(g, exact)
        assert greedy_max_weight_clique(g) == greedy


def test_greedy_on_coding_graph_matches_full_adjacency(rng):
    for _ in range(200):
        F = random_matrix(rng, 5, 6)
        params = random_params(rng, 5)
        lg = build_lgidnc_graph(F, params)
        if len(lg) == 0:
            continue
        twin = AbstractGraph(lg.adjacency, lg.weights)
        assert greedy_max_weight_clique(lg) == greedy_max_weight_clique(twin)


def test_coding_graph_cliques_target_each_user_once(rng):
    for _ in range(200):
        F = random_matrix(rng, 4, 5)
        params = random_params(rng, 4)
        for g in (build_gidnc_graph(F, params), build_lgidnc_graph(F, params)):
            if len(g) == 0:
                continue
            c = greedy_max_weight_clique(g)
            users = [g.vertex(v)[0] for v in c]
            assert len(users) == len(set(users))
            tx = clique_to_transmission(c, g)
            assert set(tx.targets) == set(users)
            assert set(tx.targets.values()) == tx.packets


def test_clique_to_transmission_shapes():
    F = FeedbackMatrix.from_rows(["0001", "0001"])
    g = build_gidnc_graph(F, ChannelParams.uniform(2, 0.2, 0.2))
    tx = clique_to_transmission((0, 1), g)
    assert tx.packets == {3} and tx.targets == {0: 3, 1: 3}

    g = build_gidnc_graph(FeedbackMatrix.from_rows(["10", "01"]), ChannelParams.uniform(2, 0.2, 0.2))
    tx = clique_to_transmission((0, 1), g)
    assert tx.packets == {0, 1} and tx.targets == {0: 0, 1: 1}
    with pytest.raises(ValueError):
        clique_to_transmission((), g)


def test_transmission_invariants():
    with pytest.raises(ValueError):
        Transmission(frozenset(), {})
    with pytest.raises(ValueError):
        Transmission(frozenset({1}), {0: 2})


def test_exhaustive_single_user_single_packet():
    F = FeedbackMatrix.from_rows(["010"])
    tx = exhaustive_best_combination(F, ChannelParams.uniform(1, 0.3, 0.3))
    assert tx.packets == {1} and tx.targets == {0: 1}


def test_exhaustive_motivating_example_prefers_uncertain_xor():
    p, q = 0.3, 0.6
    F, params = section4(p, q)
    x = innovative_probability(p, q, 1)
    tx = exhaustive_best_combination(F, params)
    # packet 2 is held by everyone, so {0, 1, 2} ties with {0, 1}; the smaller set wins
    assert tx.packets == {0, 1}
    assert expected_total_delay({0, 1}, F, params) == pytest.approx((1 - p) * x)
    assert expected_total_delay({0, 1, 2}, F, params) == pytest.approx((1 - p) * x)
    assert expected_total_delay({0}, F, params) == pytest.approx(1 - p)
    assert expected_total_delay({1}, F, params) == pytest.approx((1 - p) * (1 - x))
    assert tx.targets == {0: 0, 1: 1}


def test_exhaustive_refuses_large_frames():
    F = FeedbackMatrix.all_wanted(1, 13)
    with pytest.raises(SearchTooLarge):
        exhaustive_best_combination(F, ChannelParams.uniform(1, 0.2, 0.2))


def test_exhaustive_vs_exact_clique_on_certain_matrices(rng):
    """The exhaustive optimum never loses to the max-weight clique; how often
    the two disagree is recorded rather than asserted."""
    certain = (EntryState.HAS, EntryState.WANTS)
    mismatches = 0
    for _ in range(200):
        F = random_matrix(rng, 3, 4, states=certain)
        if F.is_bs_complete():
            continue
        params = random_params(rng, 3)
        g = build_gidnc_graph(F, params)
        clique_tx = clique_to_transmission(exact_max_weight_clique(g), g)
        best_tx = exhaustive_best_combination(F, params)
        d_clique = expected_total_delay(clique_tx.packets, F, params)
        d_best = expected_total_delay(best_tx.packets, F, params)
        assert d_best <= d_clique + 1e-9
        mismatches += d_best < d_clique - 1e-9
    print(f"exhaustive beats max-weight clique on {mismatches}/200 certain instances")
