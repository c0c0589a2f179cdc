"""Physical network model: positioned transceivers and neighbor queries."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path

from .errors import UnknownTransceiver
from .rng import SeedLike, as_generator

CONE_HALF_ANGLE = math.pi / 6
DEFAULT_GUARD_ZONE = 1e-6
DEFAULT_NEIGHBOR_CAP = 5


class Antenna(str, Enum):
    OMNI = "omni"
    DIRECTIONAL = "directional"  # 60 degree beam facing +x


class RuleSet(str, Enum):
    LINE_PROTOCOL = "LINE_PROTOCOL"
    TREE_HOP = "TREE_HOP"
    TREE_FULL_DUPLEX = "TREE_FULL_DUPLEX"
    DIRECTIONAL_PROTOCOL = "DIRECTIONAL_PROTOCOL"

    @property
    def structural(self) -> bool:
        """Tree-style rule sets read conflicts from explicit links, not geometry."""
        return self in (RuleSet.TREE_HOP, RuleSet.TREE_FULL_DUPLEX)


@dataclass(frozen=True)
class ScenarioRules:
    rule_set: RuleSet = RuleSet.DIRECTIONAL_PROTOCOL
    guard_zone: float = DEFAULT_GUARD_ZONE
    neighbor_cap: int = DEFAULT_NEIGHBOR_CAP

    def __post_init__(self):
        object.__setattr__(self, "rule_set", RuleSet(self.rule_set))
        if self.guard_zone < 0:
            raise ValueError(f"guard_zone must be >= 0, got {self.guard_zone}")
        if self.neighbor_cap < 1:
            raise ValueError(f"neighbor_cap must be >= 1, got {self.neighbor_cap}")

    def to_dict(self) -> dict:
        return {
            "rule_set": self.rule_set.value,
            "guard_zone": self.guard_zone,
            "neighbor_cap": self.neighbor_cap,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ScenarioRules:
        return cls(
            RuleSet(d.get("rule_set", RuleSet.DIRECTIONAL_PROTOCOL)),
            float(d.get("guard_zone", DEFAULT_GUARD_ZONE)),
            int(d.get("neighbor_cap", DEFAULT_NEIGHBOR_CAP)),
        )


@dataclass(frozen=True)
class Transceiver:
    id: int
    x: float
    y: float
    range: float
    antenna: Antenna = Antenna.OMNI

    def __post_init__(self):
        object.__setattr__(self, "antenna", Antenna(self.antenna))
        if not self.range >= 0:
            raise ValueError(f"transceiver {self.id}: range must be >= 0, got {self.range}")

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


def in_cone(src: Transceiver, dst: Transceiver) -> bool:
    """True if ``dst`` lies strictly inside the +x beam of ``src``.

    Points with ``x <= src.x`` are never inside, so a forward beam cannot be
    confused with the mirrored backward one.
    """
    dx = dst.x - src.x
    if dx <= 0:
        return False
    return abs(math.atan((dst.y - src.y) / dx)) < CONE_HALF_ANGLE


@dataclass(frozen=True)
class Network:
    """An immutable set of transceivers plus the scenario rules.

    ``links`` optionally fixes each sender's neighbor set explicitly (sender id
    -> receiver ids). Tree and diamond networks always carry links; line
    networks use them to pin transmissions to the source-to-sink direction.
    Geometric networks leave it ``None`` and neighbors follow from positions.
    """

    transceivers: tuple[Transceiver, ...]
    rules: ScenarioRules = field(default_factory=ScenarioRules)
    links: dict[int, tuple[int, ...]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "transceivers", tuple(self.transceivers))
        ids = [t.id for t in self.transceivers]
        if len(set(ids)) != len(ids):
            raise ValueError("transceiver ids must be unique")
        if self.rules.rule_set.structural and self.links is None:
            raise ValueError(f"{self.rules.rule_set.value} networks need explicit links")
        if self.links is not None:
            known = set(ids)
            links = {int(s): tuple(sorted(int(r) for r in rs)) for s, rs in self.links.items()}
            for s, rs in links.items():
                if s not in known:
                    raise UnknownTransceiver(s)
                for r in rs:
                    if r not in known:
                        raise UnknownTransceiver(r)
                    if r == s:
                        raise ValueError(f"transceiver {s} links to itself")
            object.__setattr__(self, "links", links)
            if self.rules.rule_set.structural:
                _check_acyclic(ids, links)

    def __len__(self) -> int:
        return len(self.transceivers)

    @cached_property
    def by_id(self) -> dict[int, Transceiver]:
        return {t.id: t for t in self.transceivers}

    @property
    def ids(self) -> list[int]:
        return [t.id for t in self.transceivers]

    def __getitem__(self, tid: int) -> Transceiver:
        try:
            return self.by_id[tid]
        except KeyError:
            raise UnknownTransceiver(tid) from None

    def distance(self, a: int, b: int) -> float:
        return math.dist(self[a].position, self[b].position)

    @cached_property
    def _neighbor_map(self) -> dict[int, tuple[int, ...]]:
        if self.links is not None:
            return {t.id: self.links.get(t.id, ()) for t in self.transceivers}
        directional = self.rules.rule_set is RuleSet.DIRECTIONAL_PROTOCOL
        out = {}
        for src in self.transceivers:
            nb = []
            for dst in self.transceivers:
                if dst.id == src.id:
                    continue
                if math.dist(src.position, dst.position) > src.range:
                    continue
                if directional and not dst.x > src.x:
                    continue
                if src.antenna is Antenna.DIRECTIONAL and not in_cone(src, dst):
                    continue
                nb.append(dst.id)
            out[src.id] = tuple(sorted(nb))
        return out

    def parent_map(self) -> dict[int, tuple[int, ...]]:
        """Receiver id -> senders that link to it (structural networks)."""
        parents: dict[int, list[int]] = {t.id: [] for t in self.transceivers}
        for s, rs in (self.links or {}).items():
            for r in rs:
                parents[r].append(s)
        return {k: tuple(sorted(v)) for k, v in parents.items()}

    # serialization

    def to_dict(self) -> dict:
        d: dict = {
            "rules": self.rules.to_dict(),
            "transceivers": [
                {"id": t.id, "x": t.x, "y": t.y, "r": t.range, "antenna": t.antenna.value}
                for t in self.transceivers
            ],
        }
        if self.links is not None:
            parents = self.parent_map()
            is_tree = self.rules.rule_set.structural and all(len(p) <= 1 for p in parents.values())
            if is_tree:
                d["tree"] = {str(c): p[0] for c, p in sorted(parents.items()) if p}
            else:
                d["links"] = {str(s): list(rs) for s, rs in sorted(self.links.items())}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Network:
        rules = ScenarioRules.from_dict(d.get("rules", {}))
        ts = [
            Transceiver(int(t["id"]), float(t["x"]), float(t["y"]), float(t["r"]), t.get("antenna", "omni"))
            for t in d["transceivers"]
        ]
        links = None
        if "links" in d:
            links = {int(s): tuple(int(r) for r in rs) for s, rs in d["links"].items()}
        elif "tree" in d:
            links = {t.id: () for t in ts}
            acc: dict[int, list[int]] = {}
            for child, parent in d["tree"].items():
                acc.setdefault(int(parent), []).append(int(child))
            links.update({p: tuple(sorted(cs)) for p, cs in acc.items()})
        return cls(tuple(ts), rules, links)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> Network:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _check_acyclic(ids, links):
    indeg = {i: 0 for i in ids}
    for rs in links.values():
        for r in rs:
            indeg[r] += 1
    queue = deque(i for i in ids if indeg[i] == 0)
    seen = 0
    while queue:
        s = queue.popleft()
        seen += 1
        for r in links.get(s, ()):
            indeg[r] -= 1
            if indeg[r] == 0:
                queue.append(r)
    if seen != len(ids):
        raise ValueError("link structure contains a cycle")


def neighbors(network: Network, i: int) -> tuple[int, ...]:
    """Transceivers that ``i`` can transmit to, in ascending id order."""
    network[i]  # raises UnknownTransceiver
    return network._neighbor_map[i]


def range_edges(network: Network) -> list[tuple[int, int]]:
    """Undirected pairs within transmission range of either endpoint."""
    ts = network.transceivers
    out = []
    for a in range(len(ts)):
        for b in range(a + 1, len(ts)):
            d = math.dist(ts[a].position, ts[b].position)
            if d <= ts[a].range or d <= ts[b].range:
                out.append((ts[a].id, ts[b].id))
    return out


def is_connected(network: Network, directional: bool = False) -> bool:
    """Single connected component test.

    By default the undirected range graph is used, ignoring antenna
    direction. With ``directional=True`` the graph is the undirected shadow of
    the actual neighbor relation (beam and x-ordering applied). Structural
    networks always use their links.
    """
    if len(network) <= 1:
        return True
    if directional or network.links is not None:
        edges = [(s, r) for s in network.ids for r in neighbors(network, s)]
    else:
        edges = range_edges(network)
    adj: dict[int, set[int]] = {i: set() for i in network.ids}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    start = network.ids[0]
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(network)


def random_network(
    n: int,
    side: float,
    rules: ScenarioRules | None = None,
    seed: SeedLike = 0,
    r_T: float = 7.0,
    antenna: Antenna | None = None,
) -> Network:
    """Uniformly scatter ``n`` transceivers over ``[0, side]^2``.

    Antennas default to the 60 degree +x beam under the directional rule set
    and omnidirectional otherwise.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not side > 0:
        raise ValueError("side must be positive")
    rules = rules or ScenarioRules()
    if antenna is None:
        antenna = Antenna.DIRECTIONAL if rules.rule_set is RuleSet.DIRECTIONAL_PROTOCOL else Antenna.OMNI
    rng = as_generator(seed)
    xy = rng.uniform(0.0, side, size=(n, 2))
    ts = tuple(Transceiver(i, float(x), float(y), float(r_T), antenna) for i, (x, y) in enumerate(xy))
    return Network(ts, rules)
