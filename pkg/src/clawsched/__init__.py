"""Scheduling on wireless conflict graphs by making them claw-free."""

from .claws import Claw, ClawReport, claw_attribution, claw_report, count_claws, list_claws, list_preclaws
from .clawfree import (
    ClawFreeResult,
    EdgeLedger,
    apply_edge,
    caro_wei,
    init_ledger,
    make_claw_free,
    recompute_ledger_naive,
    select_edge,
)
from .conflict import ConflictGraph, Transmission, build_conflict_graph, conflicts, enumerate_transmissions
from .errors import (
    ArtifactIOError,
    BudgetExceeded,
    ClawschedError,
    EdgeAlreadyPresent,
    InvalidPermutation,
    NeighborCapExceeded,
    NoMissingEdges,
    SpecViolation,
    UnknownTransceiver,
)
from .network import Antenna, Network, RuleSet, ScenarioRules, Transceiver, is_connected, neighbors, random_network
from .scheduling import (
    IndependentSet,
    Partition,
    claw_broken_schedule,
    derive_claw_partition,
    exact_mwis,
    expected_maximal_is,
    greedy_maximal_is,
    maximal_is_ordered,
    mixed_schedule,
)
from .topologies import (
    DiamondSpec,
    LineSpec,
    TreeSpec,
    TreeVariant,
    diamond_network,
    line_network,
    line_reach_configurations,
    tree_network,
)

__version__ = "0.1.0"
