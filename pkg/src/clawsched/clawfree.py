"""Greedy claw elimination by edge insertion.

Each step adds the missing edge with the best ratio of claws removed to the
estimated loss in expected maximal independent set weight. The estimate is the
weighted Caro-Wei contribution ``S_v = w(v) / (d_v + 1)`` of each vertex, so
adding ``(u, v)`` costs ``M_e = w(u)/((d_u+1)(d_u+2)) + w(v)/((d_v+1)(d_v+2))``.

The per-edge claw balance ``delta`` and the count of currently existing claws
an edge would destroy, ``delta_star``, live in an :class:`EdgeLedger` that is
updated incrementally after every insertion.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .claws import claws_at, list_claws
from .conflict import ConflictGraph
from .errors import EdgeAlreadyPresent, NoMissingEdges
from .rng import SeedLike, as_generator

Edge = tuple[int, int]


def caro_wei(g: ConflictGraph) -> float:
    """Weighted Caro-Wei lower bound on the expected maximal independent set weight."""
    return float(np.sum(g.weights / (g.degrees() + 1)))


def _check_weights(g: ConflictGraph) -> None:
    if np.any(~(g.weights > 0)):
        raise ValueError("claw freeing requires strictly positive vertex weights")


def _loss_terms(weights: np.ndarray, degree: np.ndarray) -> np.ndarray:
    return weights / ((degree + 1.0) * (degree + 2.0))


@dataclass
class EdgeLedger:
    """Bookkeeping for every missing edge of a graph.

    Matrices are full and symmetric; entries at present edges and on the
    diagonal are kept at zero.
    """

    weights: np.ndarray
    adjacency: np.ndarray
    degree: np.ndarray
    contribution: np.ndarray
    delta: np.ndarray
    delta_star: np.ndarray
    loss: np.ndarray
    claws: int

    @property
    def n(self) -> int:
        return len(self.degree)

    @property
    def missing(self) -> np.ndarray:
        m = ~self.adjacency
        np.fill_diagonal(m, False)
        return m

    def missing_edges(self) -> list[Edge]:
        iu, ju = np.nonzero(np.triu(self.missing, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    def mismatches(self, other: EdgeLedger, rtol: float = 1e-12) -> list[str]:
        """Human-readable differences; empty when the ledgers agree."""
        out = []
        if not np.array_equal(self.adjacency, other.adjacency):
            return ["adjacency differs"]
        if self.claws != other.claws:
            out.append(f"claw count {self.claws} != {other.claws}")
        if not np.array_equal(self.degree, other.degree):
            out.append("degree differs")
        for name in ("delta", "delta_star"):
            a, b = getattr(self, name), getattr(other, name)
            bad = np.argwhere(np.triu(a != b, 1) & self.missing)
            for u, v in bad[:5]:
                out.append(f"{name}[{u},{v}] {a[u, v]} != {b[u, v]}")
        if not np.allclose(self.contribution, other.contribution, rtol=rtol, atol=0):
            out.append("contribution differs")
        m = self.missing
        if not np.allclose(self.loss[m], other.loss[m], rtol=rtol, atol=0):
            out.append("loss differs")
        return out


def _base_ledger(g: ConflictGraph) -> EdgeLedger:
    _check_weights(g)
    a = g.adjacency_matrix()
    deg = a.sum(axis=1).astype(np.int64)
    w = g.weights.astype(float)
    n = g.n
    led = EdgeLedger(
        weights=w.copy(),
        adjacency=a,
        degree=deg,
        contribution=w / (deg + 1),
        delta=np.zeros((n, n), dtype=np.int64),
        delta_star=np.zeros((n, n), dtype=np.int64),
        loss=np.zeros((n, n)),
        claws=0,
    )
    q = _loss_terms(w, deg)
    led.loss = (q[:, None] + q[None, :]) * led.missing
    return led


def init_ledger(g: ConflictGraph) -> EdgeLedger:
    """Populate a ledger by scanning every vertex neighborhood once.

    For centre ``v``: each independent triple in ``N(v)`` is a claw and credits
    its three leaf pairs; each nonadjacent pair in ``N(v)`` together with a
    vertex outside ``N[v]`` and the pair's neighborhoods is a pre-claw, whose
    completing edge ``(v, outsider)`` would create a claw.
    """
    led = _base_ledger(g)
    a = led.adjacency
    total = 0
    for v in range(g.n):
        nb = np.flatnonzero(a[v])
        if len(nb) < 2:
            continue
        b = ~a[np.ix_(nb, nb)]
        np.fill_diagonal(b, False)
        bi = b.astype(np.int64)
        # for each nonadjacent leaf pair, how many third leaves complete a claw
        per_pair = (bi @ bi) * bi
        led.delta[np.ix_(nb, nb)] += per_pair
        led.delta_star[np.ix_(nb, nb)] += per_pair
        total += int(per_pair.sum())
        outside = np.flatnonzero(~a[v])
        outside = outside[outside != v]
        if len(outside) == 0:
            continue
        r = (~a[np.ix_(outside, nb)]).astype(np.int64)
        preclaws = ((r @ bi) * r).sum(axis=1) // 2
        led.delta[v, outside] -= preclaws
        led.delta[outside, v] -= preclaws
    led.claws = total // 6
    return led


def recompute_ledger_naive(g: ConflictGraph) -> EdgeLedger:
    """Reference ledger straight from the definitions (slow; for testing).

    ``delta`` is obtained by actually inserting each missing edge and
    recounting claws; ``delta_star`` by enumerating every existing claw and
    crediting its leaf pairs.
    """
    led = _base_ledger(g)
    a = led.adjacency
    existing = list_claws(g)
    led.claws = len(existing)
    pairs: Counter[Edge] = Counter()
    for c in existing:
        p, q, r = c.leaves
        pairs[(p, q)] += 1
        pairs[(p, r)] += 1
        pairs[(q, r)] += 1
    for (u, v), k in pairs.items():
        led.delta_star[u, v] = led.delta_star[v, u] = k
    before = np.array([claws_at(g, v, a) for v in range(g.n)], dtype=np.int64)
    h = g.copy()
    ah = a.copy()
    for u, v in led.missing_edges():
        h.adj[u].add(v)
        h.adj[v].add(u)
        ah[u, v] = ah[v, u] = True
        # centres whose induced neighborhood can change: the endpoints and
        # their common neighbors; every other centre keeps its claw count
        touched = {u, v} | (g.adj[u] & g.adj[v])
        after = sum(claws_at(h, c, ah) for c in touched)
        d = int(sum(before[c] for c in touched)) - after
        led.delta[u, v] = led.delta[v, u] = d
        h.adj[u].discard(v)
        h.adj[v].discard(u)
        ah[u, v] = ah[v, u] = False
    return led


def _ratio(led: EdgeLedger, u: int, v: int) -> Fraction:
    w, d = led.weights, led.degree
    m = Fraction(w[u]) / ((int(d[u]) + 1) * (int(d[u]) + 2)) + Fraction(w[v]) / ((int(d[v]) + 1) * (int(d[v]) + 2))
    return Fraction(int(led.delta[u, v])) / m


def _choose(led: EdgeLedger, rng: np.random.Generator | None) -> tuple[Edge, bool]:
    iu, ju = np.nonzero(np.triu(led.missing, 1))
    if len(iu) == 0:
        raise NoMissingEdges("graph is complete but claws remain")
    delta = led.delta[iu, ju]
    ratio = delta / led.loss[iu, ju]
    best = ratio.max()
    # float pass narrows the field, exact rational pass decides ties
    near = np.flatnonzero(ratio >= best - 1e-9 * max(1.0, abs(best)))
    exact = [_ratio(led, int(iu[k]), int(ju[k])) for k in near]
    top = max(exact)
    tied = [int(k) for k, r in zip(near, exact) if r == top]
    escaped = False
    if top <= 0:
        escaped = True
        ds = led.delta_star[iu, ju]
        tied = np.flatnonzero(ds == ds.max()).tolist()
    k = tied[0] if rng is None else tied[int(rng.integers(len(tied)))]
    return (int(iu[k]), int(ju[k])), escaped


def select_edge(ledger: EdgeLedger, rng: SeedLike | None = None) -> Edge:
    """Missing edge maximizing ``delta / loss``.

    If even the best edge would not lower the claw count, fall back to the
    edge that destroys the most existing claws. Ties are sampled uniformly
    from ``rng``; with ``rng=None`` the lowest ``(u, v)`` wins.
    """
    gen = None if rng is None else as_generator(rng)
    return _choose(ledger, gen)[0]


def apply_edge(g: ConflictGraph, ledger: EdgeLedger, e: Edge) -> None:
    """Insert ``e`` into ``g`` and bring ``ledger`` up to date in place.

    All structural cases are read off the graph as it was before the
    insertion, with ``a``/``b`` the endpoints:

    1. claw with both endpoints as leaves is destroyed;
    2. pre-claw centred at one endpoint becomes a claw;
    3. pre-claw with both endpoints as leaves is destroyed;
    4. pre-claw whose disconnected vertex is one endpoint and which has the
       other endpoint as a leaf is destroyed;
    5. a new pre-claw centred at an endpoint appears.
    """
    a_, b_ = e
    u0, v0 = min(a_, b_), max(a_, b_)
    if u0 == v0:
        raise ValueError("self-loop")
    if g.has_edge(u0, v0):
        raise EdgeAlreadyPresent(f"edge ({u0}, {v0}) already present")
    adj = ledger.adjacency
    delta, dstar = ledger.delta, ledger.delta_star

    ledger.claws -= int(delta[u0, v0])

    na = np.flatnonzero(adj[u0])
    nb = np.flatnonzero(adj[v0])
    common = np.intersect1d(na, nb, assume_unique=True)
    outside = ~(adj[u0] | adj[v0])
    outside[[u0, v0]] = False
    xs = np.flatnonzero(outside)

    if len(common) and len(xs):
        sub = adj[np.ix_(common, xs)]
        # type 1
        k = sub.sum(axis=0)
        for end in (u0, v0):
            delta[end, xs] -= k
            delta[xs, end] -= k
            dstar[end, xs] -= k
            dstar[xs, end] -= k
        # type 3
        gain = (~sub).astype(np.int64)
        delta[np.ix_(common, xs)] += gain
        delta[np.ix_(xs, common)] += gain.T

    for s, o, ns, no in ((u0, v0, na, nb), (v0, u0, nb, na)):
        only = np.setdiff1d(ns, no, assume_unique=True)
        if not len(only):
            continue
        if len(xs):
            sub = adj[np.ix_(only, xs)]
            # type 4
            k4 = sub.sum(axis=1)
            delta[o, only] += k4
            delta[only, o] += k4
            # type 5
            k5 = (~sub).sum(axis=0)
            delta[s, xs] -= k5
            delta[xs, s] -= k5
        # type 2
        bd = ~adj[np.ix_(only, only)]
        np.fill_diagonal(bd, False)
        bdi = bd.astype(np.int64)
        delta[np.ix_(only, only)] += bdi
        dstar[np.ix_(only, only)] += bdi
        k2 = bdi.sum(axis=1)
        delta[o, only] += k2
        delta[only, o] += k2
        dstar[o, only] += k2
        dstar[only, o] += k2

    g.add_edge(u0, v0)
    adj[u0, v0] = adj[v0, u0] = True
    for m in (delta, dstar, ledger.loss):
        m[u0, v0] = m[v0, u0] = 0

    deg = ledger.degree
    deg[u0] += 1
    deg[v0] += 1
    w = ledger.weights
    ledger.contribution[[u0, v0]] = w[[u0, v0]] / (deg[[u0, v0]] + 1)
    q = _loss_terms(w, deg)
    missing = ledger.missing
    for end in (u0, v0):
        row = (q[end] + q) * missing[end]
        ledger.loss[end, :] = row
        ledger.loss[:, end] = row


@dataclass
class TraceStep:
    edge: Edge
    delta: int
    loss: float
    claws_after: int
    escaped: bool

    def to_dict(self) -> dict:
        return {
            "edge": list(self.edge),
            "delta": self.delta,
            "loss": self.loss,
            "claws_after": self.claws_after,
            "escaped": self.escaped,
        }


@dataclass
class ClawFreeResult:
    final_graph: ConflictGraph
    added_edges: list[Edge]
    iterations: int
    escape_count: int
    initial_claws: int
    trace: list[TraceStep] = field(default_factory=list)

    def to_dict(self, with_trace: bool = False) -> dict:
        d = {
            "added_edges": [list(e) for e in self.added_edges],
            "iterations": self.iterations,
            "escape_count": self.escape_count,
            "initial_claws": self.initial_claws,
        }
        if with_trace:
            d["trace"] = [s.to_dict() for s in self.trace]
        return d


def make_claw_free(
    g: ConflictGraph,
    seed: SeedLike = 0,
    *,
    deterministic: bool = False,
    on_step: Callable[[ConflictGraph, EdgeLedger, TraceStep], None] | None = None,
) -> ClawFreeResult:
    """Add edges to a copy of ``g`` until it has no claws.

    ``deterministic=True`` replaces random tie-breaking by lowest-index
    selection. ``on_step`` is called after each insertion with the working
    graph and ledger, which lets tests audit the ledger along the way.
    """
    work = g.copy()
    led = init_ledger(work)
    rng = None if deterministic else as_generator(seed)
    initial = led.claws
    added: list[Edge] = []
    trace: list[TraceStep] = []
    escapes = 0
    budget = len(led.missing_edges())
    while led.claws > 0:
        assert len(added) < budget, "claw freeing failed to terminate"
        e, escaped = _choose(led, rng)
        d, m = int(led.delta[e]), float(led.loss[e])
        apply_edge(work, led, e)
        escapes += escaped
        added.append(e)
        step = TraceStep(e, d, m, led.claws, escaped)
        trace.append(step)
        if on_step is not None:
            on_step(work, led, step)
    return ClawFreeResult(work, added, len(added), escapes, initial, trace)
