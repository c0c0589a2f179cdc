"""One-slot schedules: independent sets of the conflict graph."""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .claws import claw_attribution, count_claws
from .clawfree import ClawFreeResult, make_claw_free
from .conflict import ConflictGraph
from .errors import BudgetExceeded, InvalidPermutation
from .network import Network
from .rng import SeedLike, as_generator

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**8

# When set, every returned schedule is re-checked for independence.
CHECK_INDEPENDENCE = os.environ.get("CLAWSCHED_CHECK", "") not in ("", "0")


def set_check_mode(on: bool) -> None:
    global CHECK_INDEPENDENCE
    CHECK_INDEPENDENCE = bool(on)


@dataclass(frozen=True)
class IndependentSet:
    members: tuple[int, ...]
    weight: float

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    def to_dict(self, g: ConflictGraph | None = None) -> dict:
        d: dict = {"members": list(self.members), "weight": self.weight}
        if g is not None and g.vertices is not None:
            d["transmissions"] = [g.vertices[v].to_dict() for v in self.members]
        return d


@dataclass(frozen=True)
class Partition:
    t1: frozenset[int]  # transceivers involved in claws
    t2: frozenset[int]

    @classmethod
    def of(cls, t1: Iterable[int], all_ids: Iterable[int]) -> Partition:
        t1 = frozenset(t1)
        return cls(t1, frozenset(all_ids) - t1)


def _make(g: ConflictGraph, members: Iterable[int]) -> IndependentSet:
    ms = tuple(sorted(int(v) for v in members))
    if CHECK_INDEPENDENCE and not g.is_independent(ms):
        raise AssertionError(f"schedule {ms} is not independent")
    return IndependentSet(ms, float(g.weights[list(ms)].sum()) if ms else 0.0)


def maximal_is_ordered(g: ConflictGraph, order: Sequence[int]) -> IndependentSet:
    """Scan ``order`` and keep every vertex with no neighbor kept so far."""
    order = [int(v) for v in order]
    if sorted(order) != list(range(g.n)):
        raise InvalidPermutation(f"order is not a permutation of 0..{g.n - 1}")
    chosen: list[int] = []
    blocked: set[int] = set()
    for v in order:
        if v not in blocked:
            chosen.append(v)
            blocked |= g.adj[v]
            blocked.add(v)
    return _make(g, chosen)


def greedy_maximal_is(g: ConflictGraph) -> IndependentSet:
    """Heaviest-first maximal independent set (ties by lower index)."""
    order = sorted(range(g.n), key=lambda v: (-g.weights[v], v))
    return maximal_is_ordered(g, order)


def expected_maximal_is(g: ConflictGraph, trials: int, seed: SeedLike = 0) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of the maximal-set weight over random orders.

    All ``trials`` permutations are scanned together, one position at a time.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if g.n == 0:
        return 0.0, 0.0
    rng = as_generator(seed)
    a = g.adjacency_matrix()
    perms = np.argsort(rng.random((trials, g.n)), axis=1)
    chosen = np.zeros((trials, g.n), dtype=bool)
    rows = np.arange(trials)
    for k in range(g.n):
        v = perms[:, k]
        free = ~(a[v] & chosen).any(axis=1)
        chosen[rows, v] = free
    totals = chosen.astype(float) @ g.weights
    mean = float(totals.mean())
    stderr = float(totals.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


def clique_groups(g: ConflictGraph) -> list[list[int]]:
    """Partition vertices into cliques.

    Transmissions sharing a sender always conflict, so sender groups are used
    when the graph knows its transmissions; otherwise a greedy cover.
    """
    if g.vertices is not None:
        by_sender: dict[int, list[int]] = {}
        for v, t in enumerate(g.vertices):
            by_sender.setdefault(t.sender, []).append(v)
        groups = list(by_sender.values())
        if all(all(u in g.adj[v] for u in grp if u != v) for grp in groups for v in grp):
            return groups
    groups = []
    for v in sorted(range(g.n), key=lambda v: (-g.degree(v), v)):
        for grp in groups:
            if all(u in g.adj[v] for u in grp):
                grp.append(v)
                break
        else:
            groups.append([v])
    return groups


class _Search:
    """Exact search over vertex bitmasks.

    Every subproblem is first split into connected components; a connected
    subproblem branches on its first clique group (one member or none), pruned
    by the sum of the heaviest available member of each group. Subproblem
    values are memoized, so repeated residual graphs are solved once.
    """

    def __init__(self, g: ConflictGraph, budget: int):
        self.w = [float(x) for x in g.weights]
        self.nb = [sum(1 << u for u in g.adj[v]) for v in range(g.n)]
        self.closed = [m | (1 << v) for v, m in enumerate(self.nb)]
        groups = clique_groups(g)
        for grp in groups:
            grp.sort(key=lambda v: (-self.w[v], v))
        # heavy, well-connected groups first prune hardest
        groups.sort(key=lambda grp: (-self.w[grp[0]], -sum(g.degree(v) for v in grp)))
        self.groups = groups
        self.gmask = [sum(1 << v for v in grp) for grp in groups]
        self.budget = budget
        self.nodes = 0
        self.memo: dict[int, tuple[float, int]] = {}

    def split(self, avail: int) -> list[int]:
        out = []
        while avail:
            comp = front = avail & -avail
            while front:
                bit = front & -front
                front ^= bit
                new = self.nb[bit.bit_length() - 1] & avail & ~comp
                comp |= new
                front |= new
            out.append(comp)
            avail &= ~comp
        return out

    def bound(self, avail: int) -> float:
        total = 0.0
        for grp, m in zip(self.groups, self.gmask):
            if m & avail:
                for v in grp:  # heaviest first
                    if avail >> v & 1:
                        total += self.w[v]
                        break
        return total

    def solve(self, avail: int) -> tuple[float, int]:
        """Best weight and member bitmask within ``avail``."""
        if not avail:
            return 0.0, 0
        hit = self.memo.get(avail)
        if hit is not None:
            return hit
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(self.budget)
        comps = self.split(avail)
        if len(comps) > 1:
            total, members = 0.0, 0
            for c in comps:
                val, ms = self.solve(c)
                total += val
                members |= ms
            res = (total, members)
        elif avail & (avail - 1) == 0:
            res = (self.w[avail.bit_length() - 1], avail)
        else:
            k = next(k for k, m in enumerate(self.gmask) if m & avail)
            best, best_ms = -1.0, 0
            options = [(self.w[v], 1 << v, avail & ~self.closed[v]) for v in self.groups[k] if avail >> v & 1]
            options.append((0.0, 0, avail & ~self.gmask[k]))
            for base, pick, rest in options:
                if base + self.bound(rest) <= best:
                    continue
                val, ms = self.solve(rest)
                if base + val > best:
                    best, best_ms = base + val, ms | pick
            res = (best, best_ms)
        self.memo[avail] = res
        return res


def exact_mwis(g: ConflictGraph, budget: int = DEFAULT_BUDGET) -> IndependentSet:
    """Maximum weight independent set by branch and bound.

    Connected components are solved separately. Within a component the search
    branches over clique groups (sender groups for network graphs: pick one
    member or none) and prunes with the remaining-weight bound. ``budget``
    caps node expansions across all components.
    """
    members: list[int] = []
    spent = 0
    for comp in g.components():
        if len(comp) == 1:
            members.append(comp[0])
            continue
        sub = g.subgraph(comp)
        s = _Search(sub, budget - spent)
        _, ms = s.solve((1 << sub.n) - 1)
        spent += s.nodes
        members.extend(comp[v] for v in range(sub.n) if ms >> v & 1)
    return _make(g, members)


def claw_broken(g: ConflictGraph, seed: SeedLike = 0, budget: int = DEFAULT_BUDGET) -> tuple[IndependentSet, ClawFreeResult]:
    """Claw-free the graph, solve exactly there, and score on the original graph."""
    res = make_claw_free(g, seed)
    sol = exact_mwis(res.final_graph, budget)
    # edges were only added, so the set is independent in g as well
    return _make(g, sol.members), res


def claw_broken_schedule(g: ConflictGraph, seed: SeedLike = 0, budget: int = DEFAULT_BUDGET) -> IndependentSet:
    return claw_broken(g, seed, budget)[0]


def derive_claw_partition(g: ConflictGraph, network: Network) -> Partition:
    """Put every transceiver touched by some claw in the first part."""
    heat = claw_attribution(g, network)
    return Partition.of((tid for tid, h in heat.items() if h > 0), network.ids)


def _vertex_in_part(g: ConflictGraph, t1: frozenset[int]) -> list[bool]:
    return [t.sender in t1 or any(r in t1 for r in t.receivers) for t in g.vertices]


def mixed_schedule(
    g: ConflictGraph,
    network: Network,
    p: Partition,
    seed: SeedLike = 0,
    *,
    approx: str | Callable[[ConflictGraph], IndependentSet] = "greedy",
    budget: int = DEFAULT_BUDGET,
    augment: bool = False,
) -> IndependentSet:
    """Approximate schedule on the claw zone, exact on the rest, then merge.

    A transmission belongs to the claw zone if its sender or any receiver is
    in ``p.t1``. After the union, every conflicting pair (in index order) loses
    its lighter member; on equal weight the higher index goes. ``augment``
    greedily refills the result to a maximal set afterwards.
    """
    if g.vertices is None:
        raise ValueError("mixed scheduling needs a graph built from a network")
    if p.t1 & p.t2 or (p.t1 | p.t2) != set(network.ids):
        raise ValueError("partition must split the network's transceivers")
    zone = _vertex_in_part(g, p.t1)
    v1 = [v for v in range(g.n) if zone[v]]
    v2 = [v for v in range(g.n) if not zone[v]]
    g1, g2 = g.subgraph(v1), g.subgraph(v2)

    if approx == "greedy":
        i1 = greedy_maximal_is(g1)
    elif approx == "random":
        order = as_generator(seed).permutation(g1.n)
        i1 = maximal_is_ordered(g1, order)
    else:
        i1 = approx(g1)
    if count_claws(g2) > 0:
        log.warning("claw-free zone still has claws; solving it exactly anyway")
    i2 = exact_mwis(g2, budget)

    merged = sorted([v1[v] for v in i1.members] + [v2[v] for v in i2.members])
    alive = [True] * len(merged)
    for k in range(len(merged)):
        for l in range(k + 1, len(merged)):
            if not (alive[k] and alive[l]):
                continue
            a, b = merged[k], merged[l]
            if b in g.adj[a]:
                wa, wb = g.weights[a], g.weights[b]
                if wa < wb:
                    alive[k] = False
                else:
                    alive[l] = False
    result = [v for v, ok in zip(merged, alive) if ok]
    if augment:
        blocked = set(result)
        for v in result:
            blocked |= g.adj[v]
        for v in sorted(range(g.n), key=lambda v: (-g.weights[v], v)):
            if v not in blocked:
                result.append(v)
                blocked |= g.adj[v]
                blocked.add(v)
    return _make(g, result)
