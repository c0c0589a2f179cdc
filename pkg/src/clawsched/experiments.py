"""Monte-Carlo campaigns over random networks, with CSV output."""

from __future__ import annotations

import csv
import json
import math
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .claws import count_claws
from .conflict import build_conflict_graph
from .errors import ArtifactIOError, BudgetExceeded, NeighborCapExceeded
from .network import ScenarioRules, is_connected, neighbors, random_network
from .rng import derive_seed, stream
from .scheduling import (
    DEFAULT_BUDGET,
    claw_broken,
    derive_claw_partition,
    exact_mwis,
    greedy_maximal_is,
    mixed_schedule,
)

MAX_RESAMPLES = 10_000


@dataclass
class TrialRecord:
    campaign: str
    trial: int
    seed: int  # seed of the network actually used
    n: int
    side: float
    r_T: float
    resamples: int = 0
    transmission_count: int = 0
    claw_count: int = 0
    connected: bool = False
    connected_directional: bool = False
    avg_neighbors: float = 0.0
    added_edges: int | None = None
    w_exact: float | None = None
    w_claw_broken: float | None = None
    w_greedy: float | None = None
    w_mixed: float | None = None
    timings: dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def claw_free(self) -> bool:
        return self.claw_count == 0

    @property
    def ratio_exact(self) -> float | None:
        if self.w_exact is None or self.w_claw_broken is None:
            return None
        return self.w_claw_broken / self.w_exact if self.w_exact > 0 else 1.0

    @property
    def ratio_greedy(self) -> float | None:
        if self.w_greedy is None or self.w_claw_broken is None:
            return None
        return self.w_claw_broken / self.w_greedy if self.w_greedy > 0 else 1.0


@dataclass
class SummaryRow:
    key: str  # r_T value or bucket label
    x: float  # numeric position of the row (r_T or bucket lower edge)
    trials: int
    mean_claws: float
    connected_pct: float
    connected_directional_pct: float
    claw_free_pct: float
    connected_and_claw_free_pct: float
    mean_transmissions: float
    resamples: int
    mean_added_edges: float | None = None
    mean_ratio_exact: float | None = None
    mean_ratio_greedy: float | None = None
    ratio_exact_count: int = 0
    ratio_greedy_count: int = 0


# trials


def _sample_network(n, side, r_T, rules, seed, keys):
    """Draw networks until one respects the neighbor cap."""
    for attempt in range(MAX_RESAMPLES):
        net_seed = derive_seed(seed, *keys, attempt)
        net = random_network(n, side, rules, seed=net_seed, r_T=r_T)
        try:
            g = build_conflict_graph(net)
        except NeighborCapExceeded:
            continue
        return net, g, net_seed, attempt
    raise RuntimeError(f"no network within the neighbor cap after {MAX_RESAMPLES} draws")


def _base_record(campaign, trial, net, g, net_seed, attempt, side, r_T) -> TrialRecord:
    return TrialRecord(
        campaign=campaign,
        trial=trial,
        seed=net_seed,
        n=len(net),
        side=float(side),
        r_T=float(r_T),
        resamples=attempt,
        transmission_count=g.n,
        claw_count=count_claws(g),
        connected=is_connected(net),
        connected_directional=is_connected(net, directional=True),
        avg_neighbors=float(np.mean([len(neighbors(net, i)) for i in net.ids])),
    )


def _table1_trial(job) -> TrialRecord:
    seed, n, side, r_T, r_index, trial, rules = job
    t0 = time.perf_counter()
    net, g, net_seed, attempt = _sample_network(n, side, r_T, ScenarioRules.from_dict(rules), seed, (r_index, trial))
    rec = _base_record("table1", trial, net, g, net_seed, attempt, side, r_T)
    rec.timings["total"] = time.perf_counter() - t0
    return rec


def _sweep_trial(job) -> TrialRecord:
    seed, n, side, choices, trial, rules, with_exact, with_mixed, budget = job
    r_T = float(stream(seed, trial).choice(choices))
    t0 = time.perf_counter()
    net, g, net_seed, attempt = _sample_network(n, side, r_T, ScenarioRules.from_dict(rules), seed, (trial,))
    rec = _base_record("sweep", trial, net, g, net_seed, attempt, side, r_T)
    rec.timings["build"] = time.perf_counter() - t0

    rec.w_greedy = greedy_maximal_is(g).weight
    t = time.perf_counter()
    try:
        sched, res = claw_broken(g, derive_seed(seed, trial, 1), budget)
        rec.w_claw_broken = sched.weight
        rec.added_edges = len(res.added_edges)
    except BudgetExceeded:
        pass
    rec.timings["claw_broken"] = time.perf_counter() - t
    if with_exact:
        t = time.perf_counter()
        try:
            rec.w_exact = exact_mwis(g, budget).weight
        except BudgetExceeded:
            pass
        rec.timings["exact"] = time.perf_counter() - t
    if with_mixed:
        t = time.perf_counter()
        try:
            part = derive_claw_partition(g, net)
            rec.w_mixed = mixed_schedule(g, net, part, derive_seed(seed, trial, 2), budget=budget).weight
        except BudgetExceeded:
            pass
        rec.timings["mixed"] = time.perf_counter() - t
    return rec


def _run(fn, jobs_list, jobs: int) -> list[TrialRecord]:
    if jobs <= 1 or len(jobs_list) <= 1:
        return [fn(j) for j in jobs_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, jobs_list, chunksize=max(1, len(jobs_list) // (4 * jobs))))


def table1_trials(
    n: int = 10,
    side: float = 10.0,
    r_T_list: Sequence[float] = tuple(range(7, 15)),
    trials: int = 100,
    seed: int = 0,
    rules: ScenarioRules | None = None,
    jobs: int = 1,
) -> list[TrialRecord]:
    """Random networks per range value: claws, connectivity and transmissions."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rules = (rules or ScenarioRules()).to_dict()
    work = [(seed, n, side, float(r), k, t, rules) for k, r in enumerate(r_T_list) for t in range(trials)]
    return _run(_table1_trial, work, jobs)


def run_table1(
    n: int = 10,
    side: float = 10.0,
    r_T_list: Sequence[float] = tuple(range(7, 15)),
    trials: int = 100,
    seed: int = 0,
    rules: ScenarioRules | None = None,
    jobs: int = 1,
) -> list[SummaryRow]:
    return summarize(table1_trials(n, side, r_T_list, trials, seed, rules, jobs), by_r_T)


def run_performance_sweep(
    n: int,
    side: float = 20.0,
    r_T_choices: Sequence[float] = (7.0,),
    trials: int = 100,
    seed: int = 0,
    with_exact: bool = True,
    *,
    with_mixed: bool = False,
    budget: int = DEFAULT_BUDGET,
    rules: ScenarioRules | None = None,
    jobs: int = 1,
) -> list[TrialRecord]:
    """Greedy, claw-broken and optionally exact (and mixed) weights per random network.

    Each trial draws its range uniformly from ``r_T_choices``. A solver that
    runs out of budget leaves its weight empty; the trial is kept.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rules = (rules or ScenarioRules()).to_dict()
    choices = [float(r) for r in r_T_choices]
    work = [(seed, n, side, choices, t, rules, with_exact, with_mixed, budget) for t in range(trials)]
    return _run(_sweep_trial, work, jobs)


# aggregation

Bucket = Callable[[TrialRecord], tuple[str, float]]


def by_r_T(rec: TrialRecord) -> tuple[str, float]:
    return f"{rec.r_T:g}", rec.r_T


def by_claws(width: int, start: int = 1) -> Bucket:
    """Claw-count buckets ``[start + k*width, start + (k+1)*width)``; counts below ``start`` share one."""

    def key(rec: TrialRecord) -> tuple[str, float]:
        if rec.claw_count < start:
            return f"<{start}", float(start - 1)
        k = (rec.claw_count - start) // width
        lo = start + k * width
        return f"{lo}-{lo + width - 1}", float(lo)

    return key


def by_avg_neighbors(width: float = 0.5) -> Bucket:
    def key(rec: TrialRecord) -> tuple[str, float]:
        lo = math.floor(rec.avg_neighbors / width + 1e-9) * width
        return f"{lo:g}-{lo + width:g}", float(lo)

    return key


def _mean(xs: list[float]) -> float | None:
    return sum(xs) / len(xs) if xs else None


def summarize(records: Iterable[TrialRecord], bucket: Bucket = by_r_T) -> list[SummaryRow]:
    groups: dict[tuple[float, str], list[TrialRecord]] = {}
    for rec in records:
        label, x = bucket(rec)
        groups.setdefault((x, label), []).append(rec)
    rows = []
    for (x, label), recs in sorted(groups.items()):
        k = len(recs)
        r_ex = [r.ratio_exact for r in recs if r.ratio_exact is not None]
        r_gr = [r.ratio_greedy for r in recs if r.ratio_greedy is not None]
        added = [r.added_edges for r in recs if r.added_edges is not None]
        rows.append(
            SummaryRow(
                key=label,
                x=x,
                trials=k,
                mean_claws=sum(r.claw_count for r in recs) / k,
                connected_pct=100.0 * sum(r.connected for r in recs) / k,
                connected_directional_pct=100.0 * sum(r.connected_directional for r in recs) / k,
                claw_free_pct=100.0 * sum(r.claw_free for r in recs) / k,
                connected_and_claw_free_pct=100.0 * sum(r.connected and r.claw_free for r in recs) / k,
                mean_transmissions=sum(r.transmission_count for r in recs) / k,
                resamples=sum(r.resamples for r in recs),
                mean_added_edges=_mean(added),
                mean_ratio_exact=_mean(r_ex),
                mean_ratio_greedy=_mean(r_gr),
                ratio_exact_count=len(r_ex),
                ratio_greedy_count=len(r_gr),
            )
        )
    return rows


# output

RECORD_FIELDS = [f.name for f in fields(TrialRecord) if f.name != "timings"]
SUMMARY_FIELDS = [f.name for f in fields(SummaryRow)]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    return repr(v) if isinstance(v, float) else str(v)


def _write_rows(path: str | Path, header: list[str], rows: Iterable[dict]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(row[h]) for h in header])
    except OSError as exc:
        raise ArtifactIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(records: Iterable[TrialRecord], path: str | Path, *, timings: bool = False) -> Path:
    """One row per trial. Timings are opt-in since they break byte-identical reruns."""
    records = list(records)
    header = list(RECORD_FIELDS)
    rows = [asdict(r) for r in records]
    if timings:
        keys = sorted({k for r in records for k in r.timings})
        header += [f"t_{k}" for k in keys]
        for row, r in zip(rows, records):
            row.update({f"t_{k}": r.timings.get(k) for k in keys})
    return _write_rows(path, header, rows)


def emit_summary(rows: Iterable[SummaryRow], path: str | Path) -> Path:
    return _write_rows(path, SUMMARY_FIELDS, (asdict(r) for r in rows))


_RECORD_TYPES = {f.name: f.type for f in fields(TrialRecord)}


def _parse(name: str, text: str):
    kind = _RECORD_TYPES[name]
    if text == "":
        return None
    if kind == "bool":
        return text == "1"
    if kind in ("int", "int | None"):
        return int(text)
    if kind in ("float", "float | None"):
        return float(text)
    return text


def read_csv(path: str | Path) -> list[TrialRecord]:
    """Parse a trial CSV written by :func:`emit_csv` (timing columns are ignored)."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            return [TrialRecord(**{k: _parse(k, row[k]) for k in RECORD_FIELDS}) for row in reader]
    except OSError as exc:
        raise ArtifactIOError(f"cannot read {path}: {exc.strerror or exc}") from exc


def emit_plot_script(
    rows: Sequence[SummaryRow],
    path: str | Path,
    *,
    data: str = "summary.csv",
    x_label: str = "r_T",
    series: Sequence[tuple[str, str]] = (("claw_free_pct", "claw-free %"), ("mean_claws", "mean claws")),
) -> Path:
    """Plotter-agnostic recipe: which summary columns go on which axis."""
    recipe = {
        "data": data,
        "rows": len(rows),
        "x": {"column": "x", "label": x_label, "ticks": [r.key for r in rows]},
        "series": [{"column": c, "label": lbl, "kind": "line"} for c, lbl in series],
    }
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(recipe, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
