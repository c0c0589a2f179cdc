"""Command line interface: ``clawsched <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .claws import claw_report
from .clawfree import make_claw_free
from .conflict import ConflictGraph, build_conflict_graph
from .errors import ArtifactIOError, BudgetExceeded, ClawschedError
from .network import Network, RuleSet, ScenarioRules, random_network
from .scheduling import (
    DEFAULT_BUDGET,
    IndependentSet,
    claw_broken_schedule,
    derive_claw_partition,
    exact_mwis,
    greedy_maximal_is,
    mixed_schedule,
)
from .topologies import (
    DiamondSpec,
    LineSpec,
    TreeSpec,
    TreeVariant,
    diamond_network,
    line_network,
    random_diamond_spec,
    random_line_spec,
    random_tree_spec,
    tree_network,
)

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("clawsched")


class InputError(ClawschedError, ValueError):
    pass


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _load_graph(path: str) -> tuple[ConflictGraph, Network | None]:
    """Accept either a network file (graph is built) or a conflict graph file."""
    d = _read_json(path)
    if "transceivers" in d:
        net = Network.from_dict(d)
        return build_conflict_graph(net), net
    if "vertices" in d:
        return ConflictGraph.from_dict(d), None
    raise InputError(f"{path} holds neither a network nor a conflict graph")


def _emit(args, name: str, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    path = Path(args.out) / name
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
    log.info("wrote %s", path)


# commands


def cmd_generate(args) -> None:
    seed = args.seed
    if args.family == "random":
        rules = ScenarioRules(RuleSet(args.rule_set), args.guard_zone, args.neighbor_cap)
        net = random_network(args.n, args.side, rules, seed=seed, r_T=args.r_T)
    elif args.family == "line":
        if args.spacings:
            gaps = _floats(args.spacings)
            n = len(gaps) + 1
            reach = _ints(args.reach) if args.reach else [1] * (n - 1)
            spec = LineSpec(n, tuple(gaps), args.r_T, tuple(reach))
        else:
            spec = random_line_spec(args.n, args.r_T, seed)
        net = line_network(spec, args.guard_zone)
    elif args.family == "tree":
        variant = TreeVariant(args.variant)
        if args.branching:
            spec = TreeSpec(tuple(tuple(lvl) for lvl in json.loads(args.branching)), variant)
        else:
            spec = random_tree_spec(args.levels, variant, seed)
        net = tree_network(spec, args.neighbor_cap)
    else:
        spec = DiamondSpec(tuple(_ints(args.widths))) if args.widths else random_diamond_spec(args.checkpoints, seed)
        net = diamond_network(spec)
    _emit(args, "network.json", net.to_json())


def cmd_build_graph(args) -> None:
    g, _ = _load_graph(args.input)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "v"])
        w.writerows(g.edges())
        _emit(args, "graph_edges.csv", buf.getvalue())
    else:
        _emit(args, "graph.json", json.dumps(g.to_dict()))


def cmd_analyze(args) -> None:
    g, net = _load_graph(args.input)
    if args.network:
        net = Network.from_dict(_read_json(args.network))
    rep = claw_report(g, net)
    if args.format == "csv":
        if net is None:
            raise InputError("csv attribution needs a network")
        _emit(args, "claw_heat.csv", rep.attribution_csv(net))
    else:
        _emit(args, "claws.json", rep.to_json())


def cmd_break_claws(args) -> None:
    g, _ = _load_graph(args.input)
    res = make_claw_free(g, args.seed)
    d = res.to_dict(with_trace=args.trace)
    _emit(args, "claw_free.json", json.dumps(d))


def _schedule_csv(g: ConflictGraph, s: IndependentSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "sender", "receivers", "weight"])
    for v in s.members:
        t = g.vertices[v] if g.vertices is not None else None
        w.writerow([v, "" if t is None else t.sender, "" if t is None else " ".join(map(str, t.receivers)), repr(float(g.weights[v]))])
    return buf.getvalue()


def cmd_schedule(args) -> None:
    g, net = _load_graph(args.input)
    if args.method == "exact":
        s = exact_mwis(g, args.budget)
    elif args.method == "greedy":
        s = greedy_maximal_is(g)
    elif args.method == "claw-broken":
        s = claw_broken_schedule(g, args.seed, args.budget)
    else:
        if net is None:
            raise InputError("mixed scheduling needs a network file as input")
        part = derive_claw_partition(g, net)
        s = mixed_schedule(g, net, part, args.seed, budget=args.budget)
    if args.format == "csv":
        _emit(args, "schedule.csv", _schedule_csv(g, s))
    else:
        _emit(args, "schedule.json", json.dumps({"method": args.method, **s.to_dict(g)}))


def cmd_experiment(args) -> None:
    rules = ScenarioRules(RuleSet(args.rule_set), args.guard_zone, args.neighbor_cap)
    if args.kind == "table1":
        r_list = _floats(args.r_T_list) if args.r_T_list else list(range(7, 15))
        records = ex.table1_trials(args.n, args.side, r_list, args.trials, args.seed, rules, args.jobs)
        rows = ex.summarize(records, ex.by_r_T)
        x_label = "r_T"
        series = (("claw_free_pct", "claw-free %"), ("mean_claws", "mean claws"), ("mean_transmissions", "transmissions"))
    else:
        choices = _floats(args.r_T_list) if args.r_T_list else [args.r_T]
        records = ex.run_performance_sweep(
            args.n, args.side, choices, args.trials, args.seed, not args.no_exact,
            with_mixed=args.mixed, budget=args.budget, rules=rules, jobs=args.jobs,
        )
        if args.bucket == "neighbors":
            rows = ex.summarize(records, ex.by_avg_neighbors(args.bucket_width))
            x_label = "average neighbors"
        elif args.bucket == "claws":
            rows = ex.summarize(records, ex.by_claws(int(args.bucket_width)))
            x_label = "claws"
        else:
            rows = ex.summarize(records, ex.by_r_T)
            x_label = "r_T"
        series = (("mean_ratio_exact", "claw-broken / exact"), ("mean_ratio_greedy", "claw-broken / greedy"))
    if args.format == "json" and args.out is None:
        sys.stdout.write(json.dumps([r.__dict__ for r in rows], indent=2) + "\n")
        return
    if args.out is None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(ex.SUMMARY_FIELDS)
        for r in rows:
            w.writerow([ex._cell(getattr(r, f)) for f in ex.SUMMARY_FIELDS])
        sys.stdout.write(buf.getvalue())
        return
    out = Path(args.out)
    ex.emit_csv(records, out / "trials.csv", timings=args.timings)
    ex.emit_summary(rows, out / "summary.csv")
    ex.emit_plot_script(rows, out / "plot.json", x_label=x_label, series=series)
    if args.format == "json":
        _emit(args, "summary.json", json.dumps([r.__dict__ for r in rows], indent=2))


# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="exact solver node budget")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--config", default=None, help="JSON file whose keys mirror the flags")
    p.add_argument("-v", "--verbose", action="store_true")


def _scenario(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rule-set", dest="rule_set", choices=[r.value for r in RuleSet], default=RuleSet.DIRECTIONAL_PROTOCOL.value)
    p.add_argument("--guard-zone", dest="guard_zone", type=float, default=1e-6)
    p.add_argument("--neighbor-cap", dest="neighbor_cap", type=int, default=5)


def build_parser() -> tuple[argparse.ArgumentParser, list[argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="clawsched", description="Claw-free conflict graph scheduling toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = []

    p = sub.add_parser("generate", help="write a network JSON")
    p.add_argument("--family", choices=("random", "line", "tree", "diamond"), default="random")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--side", type=float, default=10.0)
    p.add_argument("--r-T", dest="r_T", type=float, default=7.0)
    p.add_argument("--spacings", help="line: comma separated gaps")
    p.add_argument("--reach", help="line: comma separated 1/2 per sender")
    p.add_argument("--branching", help='tree: JSON list of per-level child counts, e.g. "[[2],[2,0]]"')
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--variant", choices=[v.value for v in TreeVariant], default=TreeVariant.SCENARIO_II.value)
    p.add_argument("--widths", help="diamond: comma separated checkpoint widths")
    p.add_argument("--checkpoints", type=int, default=5)
    _scenario(p)
    p.set_defaults(func=cmd_generate)
    subs.append(p)

    p = sub.add_parser("build-graph", help="conflict graph of a network")
    p.add_argument("input")
    p.set_defaults(func=cmd_build_graph)
    subs.append(p)

    p = sub.add_parser("analyze", help="claw count, list and per-transceiver attribution")
    p.add_argument("input")
    p.add_argument("--network", help="network JSON for attribution when input is a graph")
    p.set_defaults(func=cmd_analyze)
    subs.append(p)

    p = sub.add_parser("break-claws", help="add edges until the graph is claw-free")
    p.add_argument("input")
    p.set_defaults(func=cmd_break_claws)
    subs.append(p)

    p = sub.add_parser("schedule", help="one-slot schedule")
    p.add_argument("method", choices=("exact", "greedy", "claw-broken", "mixed"))
    p.add_argument("input")
    p.set_defaults(func=cmd_schedule)
    subs.append(p)

    p = sub.add_parser("experiment", help="Monte-Carlo campaigns")
    p.add_argument("kind", choices=("table1", "sweep"))
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--side", type=float, default=10.0)
    p.add_argument("--r-T", dest="r_T", type=float, default=7.0)
    p.add_argument("--r-T-list", dest="r_T_list", help="comma separated range values")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--no-exact", dest="no_exact", action="store_true")
    p.add_argument("--mixed", action="store_true")
    p.add_argument("--bucket", choices=("r_T", "claws", "neighbors"), default="r_T")
    p.add_argument("--bucket-width", dest="bucket_width", type=float, default=50.0)
    p.add_argument("--timings", action="store_true", help="add runtime columns to trials.csv")
    _scenario(p)
    p.set_defaults(func=cmd_experiment)
    subs.append(p)

    for p in subs:
        _common(p)
    return parser, subs


def _config_defaults(argv: list[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    cfg = _read_json(known.config)
    if not isinstance(cfg, dict):
        raise InputError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        cfg = _config_defaults(argv)
        for p in subs:
            p.set_defaults(**cfg)
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ArtifactIOError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ClawschedError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
