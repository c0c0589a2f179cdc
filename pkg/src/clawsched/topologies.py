"""Network families whose conflict graphs are claw-free by construction."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product

from .errors import SpecViolation
from .network import Network, RuleSet, ScenarioRules, Transceiver
from .rng import SeedLike, as_generator

_EPS = 1e-12


@dataclass(frozen=True)
class LineSpec:
    """Nodes on a line, transmitting downstream to the next one or two nodes.

    ``reach[i]`` is node ``i``'s choice for ``i`` in ``0..n-2``; the last
    sender (node ``n-2``) can only reach the sink.
    """

    n: int
    spacings: tuple[float, ...]
    r_T: float
    reach: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "spacings", tuple(float(s) for s in self.spacings))
        object.__setattr__(self, "reach", tuple(int(r) for r in self.reach))

    def validate(self) -> None:
        n, gaps, r = self.n, self.spacings, self.r_T
        if n < 2:
            raise SpecViolation("a line needs at least 2 nodes")
        if len(gaps) != n - 1:
            raise SpecViolation(f"expected {n - 1} spacings, got {len(gaps)}")
        if len(self.reach) != n - 1:
            raise SpecViolation(f"expected {n - 1} reach values, got {len(self.reach)}")
        if not r > 0:
            raise SpecViolation("r_T must be positive")
        for i, g in enumerate(gaps):
            if not g > 0:
                raise SpecViolation(f"spacing {i} must be positive")
            if g > r * (1 + _EPS):
                raise SpecViolation(f"node {i} cannot reach node {i + 1}")
        for i in range(n - 3):
            if sum(gaps[i : i + 3]) <= r:
                raise SpecViolation(f"node {i} could reach node {i + 3}")
        for i, k in enumerate(self.reach):
            if k not in (1, 2):
                raise SpecViolation(f"reach of node {i} must be 1 or 2")
            if k == 2 and i == n - 2:
                raise SpecViolation("the last sender can only reach the sink")
            if k == 2 and gaps[i] + gaps[i + 1] > r * (1 + _EPS):
                raise SpecViolation(f"node {i} cannot reach node {i + 2}")


def line_links(n: int, reach: tuple[int, ...]) -> dict[int, tuple[int, ...]]:
    links = {i: tuple(range(i + 1, i + 1 + k)) for i, k in enumerate(reach)}
    links[n - 1] = ()
    return links


def line_network(spec: LineSpec, guard_zone: float = 1e-6) -> Network:
    spec.validate()
    xs = [0.0]
    for g in spec.spacings:
        xs.append(xs[-1] + g)
    ts = tuple(Transceiver(i, x, 0.0, spec.r_T) for i, x in enumerate(xs))
    rules = ScenarioRules(RuleSet.LINE_PROTOCOL, guard_zone=guard_zone)
    return Network(ts, rules, line_links(spec.n, spec.reach))


def line_reach_configurations(n: int) -> list[tuple[int, ...]]:
    """Every distinct reach assignment of an ``n``-node line."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return [(*head, 1) for head in product((1, 2), repeat=n - 2)]


def random_line_spec(n: int, r_T: float = 1.0, seed: SeedLike = 0) -> LineSpec:
    """Random reach choices; gaps drawn one by one inside the window the constraints leave.

    Every gap is uniform on its feasible interval within ``[0.2 r_T, r_T]``; a
    dead end restarts the whole line.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = as_generator(seed)
    reach = tuple(int(k) for k in rng.integers(1, 3, size=n - 2)) + (1,)
    lo_gap = 0.2 * r_T
    for _ in range(10_000):
        gaps: list[float] = []
        for i in range(n - 1):
            lo, hi = lo_gap, r_T
            if reach[i] == 2:
                hi = min(hi, r_T - lo_gap)  # leave room for the next gap
            if i >= 1 and reach[i - 1] == 2:
                hi = min(hi, r_T - gaps[i - 1])
            if i >= 2:
                lo = max(lo, r_T - gaps[i - 2] - gaps[i - 1])
            if lo >= hi:
                break
            g = float(rng.uniform(lo, hi))
            if g <= lo:
                break
            gaps.append(g)
        else:
            spec = LineSpec(n, tuple(gaps), r_T, reach)
            try:
                spec.validate()
                return spec
            except SpecViolation:
                continue
    raise RuntimeError("could not draw a valid line spec")


class TreeVariant(str, Enum):
    SCENARIO_II = "SCENARIO_II"  # half duplex, one parent per level branches
    FULL_DUPLEX = "FULL_DUPLEX"


@dataclass(frozen=True)
class TreeSpec:
    """Children counts level by level.

    ``branching[l][j]`` is the number of children of the ``j``-th node on
    level ``l``; level 0 holds the root only.
    """

    branching: tuple[tuple[int, ...], ...]
    variant: TreeVariant = TreeVariant.SCENARIO_II

    def __post_init__(self):
        object.__setattr__(self, "branching", tuple(tuple(int(c) for c in lvl) for lvl in self.branching))
        object.__setattr__(self, "variant", TreeVariant(self.variant))

    @property
    def levels(self) -> int:
        return len(self.branching)

    def validate(self) -> None:
        if not self.branching or len(self.branching[0]) != 1:
            raise SpecViolation("level 0 must hold exactly the root")
        for l, lvl in enumerate(self.branching):
            if any(c < 0 for c in lvl):
                raise SpecViolation(f"negative child count on level {l}")
            if l + 1 < len(self.branching):
                if sum(lvl) != len(self.branching[l + 1]):
                    raise SpecViolation(f"level {l + 1} should hold {sum(lvl)} nodes")
            elif sum(lvl):
                raise SpecViolation("the last level cannot have children")
            if self.variant is TreeVariant.SCENARIO_II and sum(1 for c in lvl if c) > 1:
                raise SpecViolation(f"more than one node on level {l} has children")


def tree_network(spec: TreeSpec, neighbor_cap: int = 5) -> Network:
    """Tree with nodes numbered level by level; x is the level, y the slot."""
    spec.validate()
    rule_set = RuleSet.TREE_HOP if spec.variant is TreeVariant.SCENARIO_II else RuleSet.TREE_FULL_DUPLEX
    ts, links = [], {}
    level_ids = [[0]]
    nid = 1
    for l, lvl in enumerate(spec.branching):
        nxt = []
        for parent, count in zip(level_ids[l], lvl):
            kids = tuple(range(nid, nid + count))
            nid += count
            links[parent] = kids
            nxt.extend(kids)
        if nxt:
            level_ids.append(nxt)
    for l, ids in enumerate(level_ids):
        for j, i in enumerate(ids):
            ts.append(Transceiver(i, float(l), float(j), 1.0))
            links.setdefault(i, ())
    return Network(tuple(ts), ScenarioRules(rule_set, neighbor_cap=neighbor_cap), links)


def random_tree_spec(levels: int, variant: TreeVariant = TreeVariant.SCENARIO_II, seed: SeedLike = 0) -> TreeSpec:
    """Children counts in [1, 3]; under SCENARIO_II one node per level branches."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    rng = as_generator(seed)
    branching = []
    width = 1
    for l in range(levels):
        if l == levels - 1:
            branching.append((0,) * width)
            break
        if variant is TreeVariant.SCENARIO_II:
            lvl = [0] * width
            lvl[int(rng.integers(width))] = int(rng.integers(1, 4))
        else:
            lvl = [int(c) for c in rng.integers(0, 4, size=width)]
            if not any(lvl):
                lvl[int(rng.integers(width))] = 1
        branching.append(tuple(lvl))
        width = sum(lvl)
    return TreeSpec(tuple(branching), variant)


@dataclass(frozen=True)
class DiamondSpec:
    """Checkpoint widths; each node feeds at most two nodes of the next checkpoint.

    Consecutive widths differ by at most one. Growing checkpoints fan out
    ``j -> {j, j+1}``, shrinking ones merge ``j -> {j-1, j}``, and equal
    widths use ``j -> {j, j+1}`` clipped to the checkpoint.
    """

    widths: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))

    @property
    def checkpoints(self) -> int:
        return len(self.widths)

    def validate(self) -> None:
        if not self.widths:
            raise SpecViolation("a diamond needs at least one checkpoint")
        if any(w < 1 for w in self.widths):
            raise SpecViolation("checkpoint widths must be >= 1")
        for a, b in zip(self.widths, self.widths[1:]):
            if abs(a - b) > 1:
                raise SpecViolation(f"widths {a} -> {b} change by more than one")


def diamond_network(spec: DiamondSpec) -> Network:
    spec.validate()
    ids: list[list[int]] = []
    nid = 0
    for w in spec.widths:
        ids.append(list(range(nid, nid + w)))
        nid += w
    ts, links = [], {}
    for c, layer in enumerate(ids):
        for j, i in enumerate(layer):
            ts.append(Transceiver(i, float(c), float(j), 1.0))
            if c + 1 == len(ids):
                links[i] = ()
                continue
            w, w2 = len(layer), len(ids[c + 1])
            targets = (j - 1, j) if w2 < w else (j, j + 1)
            links[i] = tuple(ids[c + 1][t] for t in targets if 0 <= t < w2)
    net = Network(tuple(ts), ScenarioRules(RuleSet.TREE_FULL_DUPLEX), links)
    indeg = net.parent_map()
    if any(len(p) > 2 for p in indeg.values()):
        raise SpecViolation("a node would receive from more than two nodes")
    return net


def random_diamond_spec(checkpoints: int, seed: SeedLike = 0) -> DiamondSpec:
    """Widths in [1, 3] taking steps of at most one."""
    if checkpoints < 1:
        raise ValueError("checkpoints must be >= 1")
    rng = as_generator(seed)
    widths = [int(rng.integers(1, 4))]
    for _ in range(checkpoints - 1):
        step = int(rng.integers(-1, 2))
        widths.append(min(3, max(1, widths[-1] + step)))
    return DiamondSpec(tuple(widths))
