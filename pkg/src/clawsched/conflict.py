"""Broadcast transmissions and the weighted conflict graph over them."""

from __future__ import annotations

import json
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import EdgeAlreadyPresent, NeighborCapExceeded
from .network import Network, RuleSet, ScenarioRules, in_cone, neighbors


@dataclass(frozen=True, order=True)
class Transmission:
    """One sender broadcasting to a nonempty receiver set."""

    sender: int
    receivers: tuple[int, ...]

    def __post_init__(self):
        rs = tuple(sorted(set(self.receivers)))
        if not rs:
            raise ValueError("a transmission needs at least one receiver")
        if self.sender in rs:
            raise ValueError("sender cannot be one of its own receivers")
        object.__setattr__(self, "receivers", rs)

    @property
    def participants(self) -> tuple[int, ...]:
        return (self.sender, *self.receivers)

    def to_dict(self) -> dict:
        return {"sender": self.sender, "receivers": list(self.receivers)}

    def __str__(self) -> str:
        if len(self.receivers) == 1:
            return f"({self.sender},{self.receivers[0]})"
        return f"({self.sender},{{{','.join(map(str, self.receivers))}}})"


WeightFn = Callable[[Transmission], float]


def receiver_count(t: Transmission) -> float:
    return float(len(t.receivers))


def unit_weight(t: Transmission) -> float:
    return 1.0


class ConflictGraph:
    """Undirected weighted graph, usually over transmissions.

    Vertices are addressed by index ``0..n-1``; ``vertices[i]`` is the
    transmission behind vertex ``i`` when the graph came from a network (it is
    ``None`` for abstract graphs built from an edge list). Adjacency is kept
    as a list of sets and edges can only be added, never removed.
    """

    def __init__(
        self,
        weights: Sequence[float],
        edges: Iterable[tuple[int, int]] = (),
        vertices: Sequence[Transmission] | None = None,
    ):
        self.weights = np.asarray(weights, dtype=float).copy()
        n = len(self.weights)
        if vertices is not None and len(vertices) != n:
            raise ValueError("vertices and weights differ in length")
        self.vertices: list[Transmission] | None = list(vertices) if vertices is not None else None
        self.adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            self.adj[u].add(v)
            self.adj[v].add(u)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], weights: Sequence[float] | None = None):
        return cls(np.ones(n) if weights is None else weights, edges)

    @property
    def n(self) -> int:
        return len(self.adj)

    def __len__(self) -> int:
        return self.n

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if v in self.adj[u]:
            raise EdgeAlreadyPresent(f"edge ({u}, {v}) already present")
        self.adj[u].add(v)
        self.adj[v].add(u)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adj], dtype=np.int64)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def missing_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in range(u + 1, self.n) if v not in self.adj[u]]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, nb in enumerate(self.adj):
            if nb:
                a[u, list(nb)] = True
        return a

    def copy(self) -> ConflictGraph:
        g = ConflictGraph.__new__(ConflictGraph)
        g.weights = self.weights.copy()
        g.vertices = list(self.vertices) if self.vertices is not None else None
        g.adj = [set(a) for a in self.adj]
        return g

    def subgraph(self, keep: Sequence[int]) -> ConflictGraph:
        """Induced subgraph; vertex ``i`` of the result is ``keep[i]`` here."""
        pos = {v: i for i, v in enumerate(keep)}
        g = ConflictGraph.__new__(ConflictGraph)
        g.weights = self.weights[list(keep)].copy() if len(keep) else np.zeros(0)
        g.vertices = [self.vertices[v] for v in keep] if self.vertices is not None else None
        g.adj = [{pos[u] for u in self.adj[v] if u in pos} for v in keep]
        return g

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, stack = [], [s]
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self.adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            out.append(sorted(comp))
        return out

    def is_independent(self, members: Iterable[int]) -> bool:
        ms = list(members)
        s = set(ms)
        return len(s) == len(ms) and all(not (self.adj[v] & s) for v in ms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConflictGraph):
            return NotImplemented
        return (
            self.adj == other.adj
            and np.array_equal(self.weights, other.weights)
            and self.vertices == other.vertices
        )

    def __repr__(self) -> str:
        return f"<ConflictGraph n={self.n} m={self.num_edges}>"

    # serialization

    def to_dict(self) -> dict:
        if self.vertices is not None:
            vs = [{**t.to_dict(), "w": _num(w)} for t, w in zip(self.vertices, self.weights)]
        else:
            vs = [{"w": _num(w)} for w in self.weights]
        return {"vertices": vs, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_dict(cls, d: dict) -> ConflictGraph:
        vs = d["vertices"]
        verts = None
        if vs and all("sender" in v for v in vs):
            verts = [Transmission(int(v["sender"]), tuple(v["receivers"])) for v in vs]
        return cls([float(v["w"]) for v in vs], [tuple(e) for e in d["edges"]], verts)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_edgelist(self) -> str:
        lines = [f"p {self.n} {self.num_edges}"]
        lines += [f"e {u} {v}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str, weights: Sequence[float] | None = None) -> ConflictGraph:
        n = None
        edges = []
        for line in text.splitlines():
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                n = int(parts[1])
            elif parts[0] == "e":
                edges.append((int(parts[1]), int(parts[2])))
        if n is None:
            raise ValueError("edge list is missing its 'p <n> <m>' header")
        return cls.from_edges(n, edges, weights)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> ConflictGraph:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _num(w: float):
    return int(w) if float(w).is_integer() else float(w)


def enumerate_transmissions(network: Network) -> list[Transmission]:
    """Every (sender, nonempty receiver subset) pair.

    Ordered by sender id, then by the subset's bitmask over the sender's
    sorted neighbor list. Raises :class:`NeighborCapExceeded` before doing any
    exponential work.
    """
    cap = network.rules.neighbor_cap
    nbs = {}
    for tid in sorted(network.ids):
        nb = neighbors(network, tid)
        if len(nb) > cap:
            raise NeighborCapExceeded(tid, len(nb), cap)
        nbs[tid] = nb
    out = []
    for tid, nb in nbs.items():
        for mask in range(1, 1 << len(nb)):
            out.append(Transmission(tid, tuple(nb[b] for b in range(len(nb)) if mask >> b & 1)))
    return out


class _Interference:
    """Precomputed geometry for repeated conflict tests on one network."""

    def __init__(self, network: Network):
        self.network = network
        self.rule_set = network.rules.rule_set
        self.slack = 1.0 + network.rules.guard_zone
        ids = network.ids
        self.index = {tid: k for k, tid in enumerate(ids)}
        if not self.rule_set.structural:
            xy = np.array([network[t].position for t in ids], dtype=float).reshape(-1, 2)
            diff = xy[:, None, :] - xy[None, :, :]
            self.dist = np.sqrt((diff**2).sum(axis=-1))
        if self.rule_set is RuleSet.DIRECTIONAL_PROTOCOL:
            ts = network.transceivers
            self.cone = np.array([[in_cone(a, b) for b in ts] for a in ts], dtype=bool).reshape(len(ts), len(ts))
        if self.rule_set is RuleSet.TREE_HOP:
            self.parents = network.parent_map()

    def _interferes(self, i1: int, j_set, i2: int, directional: bool) -> bool:
        # some receiver j of i1 is at least as close (up to the guard zone) to i2
        a, b = self.index[i1], self.index[i2]
        for j in j_set:
            c = self.index[j]
            if self.dist[b, c] <= self.slack * self.dist[a, c]:
                if not directional or self.cone[b, c]:
                    return True
        return False

    def conflict(self, s1: Transmission, s2: Transmission) -> bool:
        i1, j1 = s1.sender, s1.receivers
        i2, j2 = s2.sender, s2.receivers
        if i1 == i2:
            return True
        rs = self.rule_set
        if rs in (RuleSet.LINE_PROTOCOL, RuleSet.TREE_HOP):
            if i1 in j2 or i2 in j1:
                return True
        if not set(j1).isdisjoint(j2):
            return True
        if rs is RuleSet.LINE_PROTOCOL:
            return self._interferes(i1, j1, i2, False) or self._interferes(i2, j2, i1, False)
        if rs is RuleSet.DIRECTIONAL_PROTOCOL:
            return self._interferes(i1, j1, i2, True) or self._interferes(i2, j2, i1, True)
        if rs is RuleSet.TREE_HOP:
            return i2 in self.parents[i1] or i1 in self.parents[i2]
        return False


def conflicts(network: Network, s1: Transmission, s2: Transmission, rules: ScenarioRules | None = None) -> bool:
    """Whether two transmissions cannot share a time slot.

    ``rules`` overrides the network's own rule set when given.
    """
    if rules is not None and rules != network.rules:
        network = replace(network, rules=rules)
    return _Interference(network).conflict(s1, s2)


def build_conflict_graph(network: Network, weight: WeightFn = receiver_count) -> ConflictGraph:
    verts = enumerate_transmissions(network)
    rule = _Interference(network)
    edges = [
        (a, b)
        for a in range(len(verts))
        for b in range(a + 1, len(verts))
        if rule.conflict(verts[a], verts[b])
    ]
    ws = [weight(t) for t in verts]
    if any(not w > 0 for w in ws):
        raise ValueError("vertex weights must be strictly positive")
    return ConflictGraph(ws, edges, verts)
