import json
from math import isclose

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clawsched.claws import count_claws
from clawsched.clawfree import (
    apply_edge,
    caro_wei,
    init_ledger,
    make_claw_free,
    recompute_ledger_naive,
    select_edge,
)
from clawsched.conflict import ConflictGraph, build_conflict_graph
from clawsched.errors import EdgeAlreadyPresent
from clawsched.network import random_network

from conftest import LINE5_EDGES, brute_mwis, random_graph, star


def test_caro_wei_examples():
    assert caro_wei(ConflictGraph.from_edges(5, [])) == 5
    assert caro_wei(ConflictGraph.from_edges(2, [(0, 1)])) == 1
    g = ConflictGraph([1, 1, 2, 1, 1, 1], LINE5_EDGES)
    assert caro_wei(g) <= brute_mwis(g) == 2


def test_star_ledger():
    led = init_ledger(star(3))
    assert led.claws == 1
    for u, v in [(1, 2), (1, 3), (2, 3)]:
        assert led.delta[u, v] == led.delta_star[u, v] == 1
    assert led.mismatches(recompute_ledger_naive(star(3))) == []
    assert isclose(led.loss[1, 2], 2 * 1 / (2 * 3))
    assert isclose(led.contribution[0], 1 / 4)


def test_edgeless_ledger():
    led = init_ledger(ConflictGraph.from_edges(4, []))
    assert led.claws == 0
    assert not led.delta.any()


def test_naive_delta_definition():
    g = star(3)
    naive = recompute_ledger_naive(g)
    h = g.copy()
    h.add_edge(1, 2)
    assert naive.delta[1, 2] == count_claws(g) - count_claws(h) == 1


def test_select_on_star_picks_leaf_edge():
    for seed in range(5):
        assert select_edge(init_ledger(star(3)), seed) in {(1, 2), (1, 3), (2, 3)}
    assert select_edge(init_ledger(star(3))) == (1, 2)


def test_unique_positive_edge_wins_regardless_of_loss():
    # claw 0-{1,2,3}; a heavy pendant on 1 makes (2,3) the only claw breaker
    # that does not also complete new claws
    g = ConflictGraph([1, 1, 1, 1, 50], [(0, 1), (0, 2), (0, 3), (1, 4)])
    led = init_ledger(g)
    positive = [e for e in led.missing_edges() if led.delta[e] > 0]
    e = select_edge(led)
    assert led.delta[e] > 0 and e in positive


ESCAPE_EDGES = [(0, 3), (0, 5), (0, 9), (1, 3), (2, 3), (2, 7), (2, 8), (4, 5), (5, 7), (6, 7), (8, 9)]
ESCAPE_WEIGHTS = [3, 3, 2, 1, 4, 3, 1, 2, 3, 3]


def test_escape_branch_fires():
    """Every missing edge has delta <= 0 but some still destroys claws."""
    g = ConflictGraph(ESCAPE_WEIGHTS, ESCAPE_EDGES)
    led = init_ledger(g)
    assert led.claws == 5
    assert all(led.delta[e] <= 0 for e in led.missing_edges())
    e = select_edge(led)
    assert led.delta_star[e] == max(led.delta_star[m] for m in led.missing_edges()) > 0
    res = make_claw_free(g, 0)
    assert res.escape_count >= 1 and count_claws(res.final_graph) == 0


def test_apply_on_star():
    g = star(3)
    led = init_ledger(g)
    apply_edge(g, led, (1, 2))
    assert led.claws == 0
    assert led.delta[1, 3] == 0 and led.delta[2, 3] == 0
    with pytest.raises(EdgeAlreadyPresent):
        apply_edge(g, led, (1, 2))


def test_type2_claw_creation():
    # path 2-1-0 (1 has two nonadjacent neighbours) plus isolated 3: adding (1,3) makes a claw
    g = ConflictGraph.from_edges(4, [(0, 1), (1, 2)])
    led = init_ledger(g)
    assert led.delta[1, 3] == -1
    apply_edge(g, led, (1, 3))
    assert led.claws == 1
    assert led.mismatches(recompute_ledger_naive(g)) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 16), st.floats(0.1, 0.8), st.integers(0, 10_000))
def test_ledger_matches_oracle_every_step(n, p, seed):
    g = random_graph(np.random.default_rng(seed), n, p)
    assert init_ledger(g).mismatches(recompute_ledger_naive(g)) == []
    s_prev = [caro_wei(g)]

    def audit(work, led, step):
        assert led.mismatches(recompute_ledger_naive(work)) == []
        assert led.claws == count_claws(work)
        s = float(led.contribution.sum())
        assert s <= s_prev[0] + 1e-12
        s_prev[0] = s

    res = make_claw_free(g, seed, on_step=audit)
    assert count_claws(res.final_graph) == 0
    assert len(res.added_edges) <= len(g.missing_edges())
    assert not set(res.added_edges) & set(g.edges())


def test_claw_free_input_unchanged(line5):
    g = build_conflict_graph(line5)
    res = make_claw_free(g)
    assert res.added_edges == [] and res.final_graph == g


def test_star_needs_one_edge():
    res = make_claw_free(star(3), 1)
    assert res.iterations == 1 and count_claws(res.final_graph) == 0


def test_one_edge_breaks_three_claws():
    # three claws share the leaf pair (1,2); one edge removes all of them
    g = ConflictGraph.from_edges(6, [(c, leaf) for c in (0, 3, 4) for leaf in (1, 2, 5)])
    g.add_edge(0, 3)
    g.add_edge(0, 4)
    g.add_edge(3, 4)
    led = init_ledger(g)
    assert led.claws == 3
    res = make_claw_free(g, 0)
    assert count_claws(res.final_graph) == 0


def test_input_graph_not_mutated_and_reproducible():
    g = random_graph(np.random.default_rng(3), 12, 0.3)
    before = g.edges()
    a = make_claw_free(g, 5)
    b = make_claw_free(g, 5)
    assert g.edges() == before
    assert a.added_edges == b.added_edges
    assert make_claw_free(g, deterministic=True).added_edges == make_claw_free(g, 99, deterministic=True).added_edges


def test_zero_weight_rejected():
    with pytest.raises(ValueError):
        init_ledger(ConflictGraph([1, 0], [(0, 1)]))


def test_trace_serialization():
    g = random_network(12, 20, seed=2, r_T=9)
    res = make_claw_free(build_conflict_graph(g), 0)
    d = json.loads(json.dumps(res.to_dict(with_trace=True)))
    assert len(d["trace"]) == res.iterations
    if res.trace:
        assert d["trace"][-1]["claws_after"] == 0
