"""Command-line entry point: ``neighborwalk <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path

from . import oracle
from .access import ApiSession
from .estimators import UnknownFeatureError, feature_from_name, mean_estimate, reweighted_estimate
from .experiment import ConfigError, ExperimentConfig, budget_for, run_experiment, write_outputs
from .graph import generate_dba, largest_weakly_connected_component, load_edge_list, write_edge_list
from .labeling import LabelMode, PropertyMap, assign_labels
from .samplers import WALKERS, SampleSequence, run_walker


def _load_graph(path: str):
    with open(path) as fh:
        return largest_weakly_connected_component(load_edge_list(fh))


def _load_props(specs: list[str], g) -> list[PropertyMap]:
    props = []
    for spec in specs:
        name, sep, path = spec.partition("=")
        if not sep:
            raise ValueError(f"property spec {spec!r} must look like name=path")
        with open(path) as fh:
            props.append(PropertyMap.read(name, fh, g))
    return props


def cmd_generate(args) -> int:
    g = generate_dba(args.nodes, args.edges_per_node, args.A, args.seed)
    with open(args.output, "w") as fh:
        write_edge_list(g, fh)
    print(f"wrote {g.n} nodes, {g.edge_count} edges to {args.output}")
    return 0


def cmd_label(args) -> int:
    g = _load_graph(args.graph)
    pm = assign_labels(g, args.mode, args.fraction, args.seed)
    with open(args.output, "w") as fh:
        pm.write(fh, g.labels)
    print(f"labeled {int(pm.values.sum())} of {g.n} nodes ({args.mode})")
    return 0


def cmd_sample(args) -> int:
    g = _load_graph(args.graph)
    props = _load_props(args.property, g)
    if args.budget is not None:
        budget = args.budget
    else:
        budget = budget_for(args.budget_ratio, g.n)
    rng = random.Random(args.seed)
    start = g.node_of(args.start) if args.start is not None else rng.randrange(g.n)
    session = ApiSession(g, props, budget=budget)
    seq = run_walker(args.walker, session, start, rng, alpha=args.alpha)
    with open(args.output, "w", newline="") as fh:
        seq.to_csv(fh)
    print(f"{len(seq)} records, {seq.queries_used} queries -> {args.output}")
    return 0


def cmd_estimate(args) -> int:
    with open(args.samples, newline="") as fh:
        seq = SampleSequence.from_csv(fh)
    estimator = mean_estimate if args.estimator == "mean" else reweighted_estimate
    for name in args.feature:
        est = estimator(seq, feature_from_name(name))
        print(f"{name}\t{est.value:.12g}\t(n={est.sample_size})")
    return 0


def cmd_verify(args) -> int:
    graphs = [("G3", oracle.g3(), [])]
    if args.graph:
        graphs.append((Path(args.graph).name, _load_graph(args.graph), []))
    for seed in range(args.random):
        g = oracle.random_connected_digraph(args.random_nodes, seed)
        labels = assign_labels(g, LabelMode.HIGH_DEGREE, 0.3, seed, name="high_degree")
        graphs.append((f"random{seed}", g, [labels]))
    checks = oracle.run_suite(graphs, alphas=args.alpha)
    sys.stdout.write(oracle.format_report(checks) if args.verbose else oracle.format_report(checks).splitlines()[-1] + "\n")
    return 0 if all(c.passed for c in checks) else 1


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.parse(Path(args.config).read_text())
    if args.workers is not None:
        cfg.workers = args.workers
    rows = run_experiment(cfg)
    write_outputs(rows, args.csv, args.svg, args.metric)
    if not args.csv:
        from .experiment import emit_csv

        emit_csv(rows, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neighborwalk", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a DBA graph as an edge list")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges-per-node", type=int, default=10)
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("label", help="assign synthetic binary labels")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=[m.value for m in LabelMode], required=True)
    p.add_argument("--fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("sample", help="run one walk and write its records as CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--walker", choices=sorted(WALKERS), default="proposed")
    p.add_argument("--alpha", type=float, default=0.9)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--budget", type=int)
    group.add_argument("--budget-ratio", type=float)
    p.add_argument("--start", type=int, help="original id of the start node (default: random)")
    p.add_argument("--property", action="append", default=[], metavar="NAME=FILE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="estimate features from a sample CSV")
    p.add_argument("--samples", required=True)
    p.add_argument("--feature", action="append", required=True)
    p.add_argument("--estimator", choices=["reweighted", "mean"], default="reweighted")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="run the Markov-chain oracle suite")
    p.add_argument("--graph", help="also check this (small) edge-list graph")
    p.add_argument("--random", type=int, default=20, help="number of random test graphs")
    p.add_argument("--random-nodes", type=int, default=10)
    p.add_argument("--alpha", type=float, nargs="+", default=[0.1, 0.5, 0.9, 0.99])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run an NRMSE experiment from a config file")
    p.add_argument("config")
    p.add_argument("--csv")
    p.add_argument("--svg")
    p.add_argument("--metric", choices=["nrmse", "sample_size"], default="nrmse")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, UnknownFeatureError, ConfigError, oracle.ConvergenceError) as exc:
        parser.print_usage(sys.stderr)
        print(f"neighborwalk {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
