import pytest

from clawsched.claws import count_claws, list_claws
from clawsched.conflict import build_conflict_graph
from clawsched.errors import SpecViolation
from clawsched.network import RuleSet
from clawsched.topologies import (
    DiamondSpec,
    LineSpec,
    TreeSpec,
    TreeVariant,
    diamond_network,
    line_network,
    line_reach_configurations,
    random_diamond_spec,
    random_line_spec,
    random_tree_spec,
    tree_network,
)

from conftest import LINE5_EDGES

# Conflict graph of the 9-node example tree, vertices v1..v9 in canonical order
TREE_EDGES = {
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (1, 3), (1, 4), (1, 5),
    (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (3, 6), (3, 7), (3, 8), (4, 5),
    (4, 6), (4, 7), (4, 8), (5, 6), (5, 7), (5, 8), (6, 7), (6, 8), (7, 8),
}


def test_line_example(line5):
    g = build_conflict_graph(line5)
    assert g.edges() == LINE5_EDGES
    assert count_claws(g) == 0


def test_tree_example(tree9):
    assert tree9.links[0] == (1, 2) and tree9.links[1] == (3, 4) and tree9.links[3] == (5, 6)
    g = build_conflict_graph(tree9)
    assert g.n == 9 and g.num_edges == 27
    assert set(g.edges()) == TREE_EDGES
    assert count_claws(g) == 0


def test_reach_configurations():
    for n in range(2, 11):
        confs = line_reach_configurations(n)
        assert len(confs) == 2 ** (n - 2) == len(set(confs))
        assert all(c[-1] == 1 for c in confs)
    with pytest.raises(ValueError):
        line_reach_configurations(1)


@pytest.mark.parametrize(
    "spec",
    [
        LineSpec(3, (1.0, 2.5), 2.0, (1, 1)),  # gap longer than the range
        LineSpec(4, (0.5, 0.5, 0.5), 2.0, (1, 1, 1)),  # node 0 reaches node 3
        LineSpec(3, (1.0, 1.0), 2.0, (3, 1)),  # bad reach value
        LineSpec(3, (1.0, 1.0), 2.0, (1, 2)),  # last sender skips the sink
        LineSpec(4, (1.5, 1.5, 1.5), 2.0, (2, 1, 1)),  # two hops out of range
        LineSpec(3, (1.0,), 2.0, (1, 1)),  # wrong spacing count
    ],
)
def test_line_spec_violations(spec):
    with pytest.raises(SpecViolation):
        line_network(spec)


def test_two_node_line():
    g = build_conflict_graph(line_network(LineSpec(2, (1.0,), 1.0, (1,))))
    assert (g.n, g.num_edges) == (1, 0)


def _equal_line(n, reach, r=2.5):
    return line_network(LineSpec(n, (1.0,) * (n - 1), r, reach))


@pytest.mark.parametrize("n", range(2, 8))
def test_equal_spacing_lines_claw_free(n):
    for reach in line_reach_configurations(n):
        assert count_claws(build_conflict_graph(_equal_line(n, reach))) == 0


def test_longer_line_can_have_claws():
    # center (2,{3,4}) with leaves (0,1), (3,4) and (6,7): the two-hop
    # broadcast collides with receivers on both sides, which do not collide
    net = _equal_line(8, (1, 1, 2, 1, 1, 1, 1))
    g = build_conflict_graph(net)
    claws = list_claws(g)
    assert claws
    shown = [(str(g.vertices[c.center]), tuple(str(g.vertices[v]) for v in c.leaves)) for c in claws]
    assert ("(2,{3,4})", ("(0,1)", "(3,4)", "(6,7)")) in shown


def test_random_line_spec_valid_and_reproducible():
    for seed in range(20):
        spec = random_line_spec(7, 1.0, seed)
        spec.validate()
        assert spec == random_line_spec(7, 1.0, seed)


def test_tree_spec_violations():
    with pytest.raises(SpecViolation):
        TreeSpec(((1, 1),)).validate()
    with pytest.raises(SpecViolation):
        TreeSpec(((2,), (1, 1), (0, 0))).validate()  # two branching parents
    with pytest.raises(SpecViolation):
        TreeSpec(((2,), (1, 0))).validate()  # level 2 missing
    with pytest.raises(SpecViolation):
        TreeSpec(((2,), (0, 0, 0))).validate()
    TreeSpec(((2,), (1, 1), (0, 0)), TreeVariant.FULL_DUPLEX).validate()


@pytest.mark.parametrize("k", range(1, 6))
def test_single_root_is_a_clique(k):
    net = tree_network(TreeSpec(((k,), (0,) * k)), neighbor_cap=k)
    g = build_conflict_graph(net)
    assert g.n == 2**k - 1
    assert g.num_edges == g.n * (g.n - 1) // 2


def test_tree_rule_sets():
    assert tree_network(random_tree_spec(3, seed=1)).rules.rule_set is RuleSet.TREE_HOP
    full = tree_network(random_tree_spec(3, TreeVariant.FULL_DUPLEX, seed=1))
    assert full.rules.rule_set is RuleSet.TREE_FULL_DUPLEX


@pytest.mark.parametrize("variant", list(TreeVariant))
def test_random_trees_claw_free(variant):
    for seed in range(40):
        spec = random_tree_spec(4, variant, seed)
        spec.validate()
        assert count_claws(build_conflict_graph(tree_network(spec))) == 0


def test_diamond_example():
    net = diamond_network(DiamondSpec((1, 2, 3, 2, 1)))
    assert net.links[0] == (1, 2)
    assert net.links[1] == (3, 4) and net.links[2] == (4, 5)
    assert net.links[6] == (8,) and net.links[7] == (8,)
    g = build_conflict_graph(net)
    assert count_claws(g) == 0


def test_diamond_chain():
    net = diamond_network(DiamondSpec((1, 1, 1, 1)))
    assert [net.links[i] for i in range(4)] == [(1,), (2,), (3,), ()]
    assert count_claws(build_conflict_graph(net)) == 0


def test_diamond_violations():
    with pytest.raises(SpecViolation):
        diamond_network(DiamondSpec((1, 3)))
    with pytest.raises(SpecViolation):
        diamond_network(DiamondSpec((1, 0)))
    with pytest.raises(SpecViolation):
        diamond_network(DiamondSpec(()))


def test_random_diamonds_claw_free():
    for seed in range(40):
        spec = random_diamond_spec(6, seed)
        assert count_claws(build_conflict_graph(diamond_network(spec))) == 0
