import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clawsched.errors import UnknownTransceiver
from clawsched.network import (
    Antenna,
    Network,
    RuleSet,
    ScenarioRules,
    Transceiver,
    in_cone,
    is_connected,
    neighbors,
    random_network,
    range_edges,
)

LINE = ScenarioRules(RuleSet.LINE_PROTOCOL)


def geometric_line5(r=3.0):
    xs = [0, 2 * r / 3, r, 2 * r, 3 * r]
    return Network(tuple(Transceiver(i, x, 0.0, r) for i, x in enumerate(xs)), LINE)


def test_line5_neighbors_of_a():
    assert neighbors(geometric_line5(), 0) == (1, 2)


def test_line5_linked_neighbors(line5):
    assert neighbors(line5, 0) == (1, 2)
    assert neighbors(line5, 4) == ()


def test_single_transceiver_has_no_neighbors():
    net = Network((Transceiver(0, 0, 0, 1.0),), LINE)
    assert neighbors(net, 0) == ()
    assert is_connected(net)


def test_range_boundary_is_inclusive():
    net = Network((Transceiver(0, 0, 0, 2.0), Transceiver(1, 2.0, 0, 2.0)), LINE)
    assert neighbors(net, 0) == (1,)
    assert neighbors(net, 1) == (0,)


def test_unknown_id():
    with pytest.raises(UnknownTransceiver):
        neighbors(geometric_line5(), 99)


def test_connectivity():
    assert is_connected(geometric_line5())
    far = Network((Transceiver(0, 0, 0, 1.0), Transceiver(1, 5.0, 0, 1.0)), LINE)
    assert not is_connected(far)


def test_directional_neighbors_need_beam_and_forward_x():
    rules = ScenarioRules(RuleSet.DIRECTIONAL_PROTOCOL)
    d = Antenna.DIRECTIONAL
    ts = (
        Transceiver(0, 0, 0, 5, d),
        Transceiver(1, 2, 0.5, 5, d),  # inside the beam
        Transceiver(2, 1, 3, 5, d),  # ahead but outside 30 degrees
        Transceiver(3, -1, 0, 5, d),  # behind
        Transceiver(4, 0, 2, 5, d),  # same x: never
    )
    net = Network(ts, rules)
    assert neighbors(net, 0) == (1,)
    assert 0 not in neighbors(net, 1)


def test_in_cone_edges():
    src = Transceiver(0, 0, 0, 1)
    assert in_cone(src, Transceiver(1, 1, 0, 1))
    assert not in_cone(src, Transceiver(1, 1, math.tan(math.pi / 6) + 1e-9, 1))
    assert not in_cone(src, Transceiver(1, -1, 0, 1))


def test_random_network_deterministic_and_bounded():
    a = random_network(10, 10, seed=4)
    b = random_network(10, 10, seed=4)
    assert a == b
    assert all(0 <= t.x <= 10 and 0 <= t.y <= 10 for t in a.transceivers)
    assert random_network(10, 10, seed=5) != a


def test_rules_validation():
    with pytest.raises(ValueError):
        ScenarioRules(guard_zone=-1)
    with pytest.raises(ValueError):
        ScenarioRules(neighbor_cap=0)


def test_tree_rules_require_links():
    with pytest.raises(ValueError):
        Network((Transceiver(0, 0, 0, 1),), ScenarioRules(RuleSet.TREE_HOP))


def test_cyclic_links_rejected():
    ts = (Transceiver(0, 0, 0, 1), Transceiver(1, 1, 0, 1))
    with pytest.raises(ValueError):
        Network(ts, ScenarioRules(RuleSet.TREE_FULL_DUPLEX), {0: (1,), 1: (0,)})


def test_json_round_trip(tmp_path, tree9):
    for net in (random_network(8, 10, seed=1), tree9):
        path = tmp_path / "net.json"
        net.save(path)
        assert Network.load(path) == net
    assert "tree" in tree9.to_dict()


def _union_find_connected(net):
    parent = {i: i for i in net.ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in range_edges(net):
        parent[find(a)] = find(b)
    return len({find(i) for i in net.ids}) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 15), st.floats(1, 30), st.floats(0.5, 15), st.integers(0, 10_000))
def test_connectivity_matches_union_find(n, side, r, seed):
    net = random_network(n, side, ScenarioRules(RuleSet.LINE_PROTOCOL), seed=seed, r_T=r)
    assert is_connected(net) == _union_find_connected(net)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10_000), st.booleans())
def test_neighbor_symmetry(n, seed, directional):
    rs = RuleSet.DIRECTIONAL_PROTOCOL if directional else RuleSet.LINE_PROTOCOL
    net = random_network(n, 10, ScenarioRules(rs, neighbor_cap=n), seed=seed, r_T=6)
    for i in net.ids:
        for j in neighbors(net, i):
            if directional:
                assert i not in neighbors(net, j)
            else:
                assert i in neighbors(net, j)


def test_random_network_coordinates_reproducible_bitwise():
    a = np.array([t.position for t in random_network(20, 20, seed=9).transceivers])
    b = np.array([t.position for t in random_network(20, 20, seed=9).transceivers])
    assert a.tobytes() == b.tobytes()
