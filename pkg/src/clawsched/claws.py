"""Claw (induced K1,3) detection, counting and attribution to transceivers."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .conflict import ConflictGraph
from .network import Network


@dataclass(frozen=True, order=True)
class Claw:
    center: int
    leaves: tuple[int, int, int]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset((self.center, *self.leaves))


@dataclass
class ClawReport:
    count: int
    claws: list[Claw] = field(default_factory=list)
    attribution: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "claws": [{"center": c.center, "leaves": list(c.leaves)} for c in self.claws],
            "attribution": {str(k): v for k, v in sorted(self.attribution.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def attribution_csv(self, network: Network) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "x", "y", "weight"])
        for t in network.transceivers:
            w.writerow([t.id, repr(t.x), repr(t.y), self.attribution.get(t.id, 0)])
        return buf.getvalue()


def _local_nonadjacency(a: np.ndarray, nb: np.ndarray) -> np.ndarray:
    b = ~a[np.ix_(nb, nb)]
    np.fill_diagonal(b, False)
    return b


def claws_at(g: ConflictGraph, v: int, a: np.ndarray | None = None) -> int:
    """Number of claws centred at ``v`` (independent triples in its neighborhood)."""
    if g.degree(v) < 3:
        return 0
    a = g.adjacency_matrix() if a is None else a
    nb = np.fromiter(sorted(g.adj[v]), dtype=np.int64)
    b = _local_nonadjacency(a, nb).astype(np.int64)
    # triangles of the local non-adjacency graph
    return int(np.einsum("ij,jk,ki->", b, b, b)) // 6


def count_claws(g: ConflictGraph) -> int:
    """Distinct induced K1,3 subgraphs.

    A vertex whose neighborhood holds M pairwise nonadjacent vertices
    contributes C(M, 3); each claw has a unique centre so nothing is counted
    twice.
    """
    a = g.adjacency_matrix()
    return sum(claws_at(g, v, a) for v in range(g.n))


def list_claws(g: ConflictGraph) -> list[Claw]:
    out = []
    for v in range(g.n):
        nb = sorted(g.adj[v])
        for i, p in enumerate(nb):
            ap = g.adj[p]
            for j in range(i + 1, len(nb)):
                q = nb[j]
                if q in ap:
                    continue
                aq = g.adj[q]
                for r in nb[j + 1 :]:
                    if r not in ap and r not in aq:
                        out.append(Claw(v, (p, q, r)))
    return out


def claw_attribution(g: ConflictGraph, network: Network, claws: list[Claw] | None = None) -> dict[int, int]:
    """Heat-map weights: one unit per appearance of a transceiver in a claw.

    For every claw and each of its four transmissions, the sender and every
    receiver get one unit. All network ids are present in the result.
    """
    if g.vertices is None:
        raise ValueError("attribution needs a graph built from a network")
    claws = list_claws(g) if claws is None else claws
    heat: Counter[int] = Counter({tid: 0 for tid in network.ids})
    for claw in claws:
        for v in (claw.center, *claw.leaves):
            t = g.vertices[v]
            heat[t.sender] += 1
            for r in t.receivers:
                heat[r] += 1
    return dict(heat)


def claw_report(g: ConflictGraph, network: Network | None = None) -> ClawReport:
    claws = list_claws(g)
    attribution = claw_attribution(g, network, claws) if network is not None else {}
    return ClawReport(len(claws), claws, attribution)


def list_preclaws(g: ConflictGraph) -> list[tuple[int, tuple[int, int], int]]:
    """Induced K1,2 plus a fourth vertex adjacent to none of its three vertices.

    Returned as ``(center, (leaf, leaf), disconnected)``.
    """
    out = []
    for c in range(g.n):
        for p, q in combinations(sorted(g.adj[c]), 2):
            if q in g.adj[p]:
                continue
            blocked = g.adj[c] | g.adj[p] | g.adj[q]
            for x in range(g.n):
                if x not in blocked and x not in (c, p, q):
                    out.append((c, (p, q), x))
    return out
