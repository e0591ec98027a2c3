"""Monte-Carlo NRMSE experiments comparing walkers at equal query budgets."""

from __future__ import annotations

import csv
import logging
import math
import random
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .access import ApiSession, profile_table
from .estimators import estimate_all, exact_expectation, feature_from_name
from .graph import DirectedGraph, generate_dba, largest_weakly_connected_component, load_edge_list
from .labeling import LabelMode, PropertyMap, assign_labels
from .samplers import WALKERS, run_walker

log = logging.getLogger(__name__)

ALPHA_SWEEP = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99)
COMPARISON_RATIOS = tuple(round(0.0025 * k, 4) for k in range(1, 21))


class ConfigError(ValueError):
    pass


def nrmse(true_value: float, estimates: Sequence[float]) -> float:
    """Root-mean-square error of ``estimates`` around ``true_value``, divided by it."""
    if true_value == 0:
        raise ValueError("NRMSE is undefined for a zero true value")
    if len(estimates) == 0:
        raise ValueError("need at least one estimate")
    err = np.asarray(estimates, dtype=float) - true_value
    return math.sqrt(float(np.mean(err * err))) / true_value


@dataclass(frozen=True)
class LabelSpec:
    mode: str
    fraction: float = 0.1
    seed: int = 0

    @property
    def name(self) -> str:
        return self.mode


@dataclass
class ExperimentConfig:
    graph_path: str | None = None
    dba_nodes: int = 10_000
    dba_edges_per_node: int = 10
    dba_A: float = 1.0
    dba_seed: int = 0
    labels: list[LabelSpec] = field(default_factory=list)
    samplers: list[str] = field(default_factory=lambda: ["proposed", "srw", "nbrw", "mhrw"])
    alphas: list[float] = field(default_factory=lambda: [0.5, 0.9])
    budget_ratios: list[float] = field(default_factory=lambda: [0.01])
    features: list[str] = field(default_factory=lambda: ["out_degree"])
    runs: int = 200
    seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not self.budget_ratios or any(not 0 < r < 1 for r in self.budget_ratios):
            raise ConfigError("budget ratios must lie in (0, 1)")
        if any(not 0 <= a < 1 for a in self.alphas):
            raise ConfigError("alpha values must lie in [0, 1)")
        unknown = [s for s in self.samplers if s not in WALKERS]
        if unknown:
            raise ConfigError(f"unknown samplers: {unknown}")
        if "proposed" in self.samplers and not self.alphas:
            raise ConfigError("the proposed sampler needs at least one alpha")
        for name in self.features:
            feature_from_name(name)
        for spec in self.labels:
            try:
                LabelMode(spec.mode)
            except ValueError:
                raise ConfigError(f"unknown label mode {spec.mode!r}") from None

    @classmethod
    def parse(cls, text: str) -> "ExperimentConfig":
        """Read ``key = value`` lines; list values are comma-separated.

        Labels are written ``mode:fraction:seed``, e.g.
        ``labels = random:0.1:1, high_degree:0.1:2``.
        """
        cfg = cls()
        types = {f.name: f.type for f in fields(cls)}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            items = [v.strip() for v in value.split(",") if v.strip()]
            try:
                if key == "labels":
                    specs = []
                    for item in items:
                        mode, *rest = item.split(":")
                        fraction = float(rest[0]) if rest else 0.1
                        seed = int(rest[1]) if len(rest) > 1 else 0
                        specs.append(LabelSpec(mode, fraction, seed))
                    cfg.labels = specs
                elif key in ("samplers", "features"):
                    setattr(cfg, key, items)
                elif key in ("alphas", "budget_ratios"):
                    setattr(cfg, key, [float(v) for v in items])
                elif key == "graph_path":
                    cfg.graph_path = value or None
                elif key == "dba_A":
                    cfg.dba_A = float(value)
                else:
                    setattr(cfg, key, int(value))
            except (ValueError, IndexError) as exc:
                raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class ResultRow:
    sampler: str
    alpha: float | None
    budget_ratio: float
    feature: str
    true_value: float
    mean_estimate: float
    nrmse: float
    runs: int
    mean_sample_size: float
    mean_queries: float

    def sort_key(self):
        return (self.sampler, -1.0 if self.alpha is None else self.alpha, self.budget_ratio, self.feature)


def budget_for(ratio: float, n: int) -> int:
    return max(1, math.ceil(ratio * n - 1e-9))


def run_seed(base_seed: int, sampler: str, alpha: float | None, ratio: float, run: int) -> int:
    tag = zlib.crc32(f"{sampler}|{alpha!r}|{ratio!r}".encode())
    state = np.random.SeedSequence([base_seed, tag, run]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])


def prepare_graph(cfg: ExperimentConfig) -> tuple[DirectedGraph, list[PropertyMap]]:
    """Load or generate the graph, keep its largest weak component, attach labels."""
    if cfg.graph_path:
        with open(cfg.graph_path) as fh:
            g = load_edge_list(fh)
    else:
        g = generate_dba(cfg.dba_nodes, cfg.dba_edges_per_node, cfg.dba_A, cfg.dba_seed)
    g = largest_weakly_connected_component(g)
    props = [assign_labels(g, spec.mode, spec.fraction, spec.seed, name=spec.name) for spec in cfg.labels]
    return g, props


_shared: dict = {}


def _init_worker(graph, props):
    _shared["graph"] = graph
    _shared["table"] = profile_table(graph, props)


def _simulate(job) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sampler, alpha, ratio, runs, base_seed, feature_names = job
    g = _shared["graph"]
    table = _shared["table"]
    features = [feature_from_name(name) for name in feature_names]
    budget = budget_for(ratio, g.n)
    est = np.empty((runs, len(features)))
    sizes = np.empty(runs)
    queries = np.empty(runs)
    for run in range(runs):
        rng = random.Random(run_seed(base_seed, sampler, alpha, ratio, run))
        start = rng.randrange(g.n)
        session = ApiSession(g, budget=budget, table=table)
        try:
            seq = run_walker(sampler, session, start, rng, alpha=alpha or 0.0)
        except Exception as exc:
            raise RuntimeError(f"{sampler} alpha={alpha} ratio={ratio} run {run} failed: {exc}") from exc
        est[run] = [e.value for e in estimate_all(seq, features)]
        sizes[run] = len(seq)
        queries[run] = seq.queries_used
    return est, sizes, queries


def run_experiment(
    cfg: ExperimentConfig, graph: DirectedGraph | None = None, props: Sequence[PropertyMap] | None = None
) -> list[ResultRow]:
    """Run ``cfg.runs`` independent walks per (sampler, alpha, ratio) and score each feature.

    ``graph``/``props`` bypass loading and labeling when given.
    """
    cfg.validate()
    if graph is None:
        graph, props = prepare_graph(cfg)
    props = list(props or [])
    features = [feature_from_name(name) for name in cfg.features]
    truth = [exact_expectation(graph, props, f) for f in features]

    jobs = []
    for sampler in cfg.samplers:
        for alpha in (cfg.alphas if sampler == "proposed" else [None]):
            for ratio in cfg.budget_ratios:
                jobs.append((sampler, alpha, ratio, cfg.runs, cfg.seed, list(cfg.features)))
    log.info("running %d configurations x %d runs on %r", len(jobs), cfg.runs, graph)

    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(graph, props)) as pool:
            outputs = list(pool.map(_simulate, jobs))
    else:
        _init_worker(graph, props)
        outputs = [_simulate(job) for job in jobs]

    rows = []
    for (sampler, alpha, ratio, runs, _, _), (est, sizes, queries) in zip(jobs, outputs):
        for k, f in enumerate(features):
            rows.append(
                ResultRow(
                    sampler=sampler,
                    alpha=alpha,
                    budget_ratio=ratio,
                    feature=f.name,
                    true_value=truth[k],
                    mean_estimate=float(est[:, k].mean()),
                    nrmse=nrmse(truth[k], est[:, k]),
                    runs=runs,
                    mean_sample_size=float(sizes.mean()),
                    mean_queries=float(queries.mean()),
                )
            )
    return sorted(rows, key=ResultRow.sort_key)


CSV_FIELDS = [f.name for f in fields(ResultRow)]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".15g")
    return str(value)


def emit_csv(rows: Sequence[ResultRow], sink) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in sorted(rows, key=ResultRow.sort_key):
        writer.writerow([_fmt(getattr(row, name)) for name in CSV_FIELDS])


def read_csv(source) -> list[ResultRow]:
    rows = []
    for rec in csv.DictReader(source):
        rows.append(
            ResultRow(
                sampler=rec["sampler"],
                alpha=float(rec["alpha"]) if rec["alpha"] else None,
                budget_ratio=float(rec["budget_ratio"]),
                feature=rec["feature"],
                true_value=float(rec["true_value"]),
                mean_estimate=float(rec["mean_estimate"]),
                nrmse=float(rec["nrmse"]),
                runs=int(rec["runs"]),
                mean_sample_size=float(rec["mean_sample_size"]),
                mean_queries=float(rec["mean_queries"]),
            )
        )
    return rows


def series_label(row: ResultRow) -> str:
    return row.sampler if row.alpha is None else f"{row.sampler} a={row.alpha:g}"


def chart_series(rows: Sequence[ResultRow], metric: str) -> dict[str, list[tuple[float, float]]]:
    """Group rows into one (ratio, value) polyline per sampler/alpha."""
    if metric not in ("nrmse", "sample_size"):
        raise ValueError("metric must be 'nrmse' or 'sample_size'")
    if not rows:
        raise ValueError("nothing to plot")
    if metric == "nrmse" and len({r.feature for r in rows}) > 1:
        raise ValueError("nrmse charts need rows for a single feature")
    series: dict[str, dict[float, float]] = {}
    for r in sorted(rows, key=ResultRow.sort_key):
        y = r.nrmse if metric == "nrmse" else r.mean_sample_size
        series.setdefault(series_label(r), {})[r.budget_ratio] = y
    return {name: sorted(points.items()) for name, points in series.items()}


def emit_chart(rows: Sequence[ResultRow], metric: str, sink) -> None:
    """Write an SVG line chart; ``sink`` is a text stream."""
    series = chart_series(rows, metric)
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "neighborwalk", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for name, points in series.items():
            xs, ys = zip(*points)
            ax.plot([100 * x for x in xs], ys, marker="o", label=name)
        ax.set_xlabel("query budget (% of nodes)")
        if metric == "nrmse":
            ax.set_ylabel("NRMSE")
            ax.set_title(rows[0].feature)
        else:
            ax.set_ylabel("mean sample size")
        ax.legend()
        fig.tight_layout()
        fig.savefig(sink, format="svg", metadata={"Date": None})
        plt.close(fig)


def write_outputs(rows: Sequence[ResultRow], csv_path: str | Path | None, svg_path: str | Path | None, metric: str = "nrmse") -> None:
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            emit_csv(rows, fh)
    if svg_path:
        svg_path = Path(svg_path)
        if metric == "nrmse":
            for feature in sorted({r.feature for r in rows}):
                subset = [r for r in rows if r.feature == feature]
                target = svg_path if len({r.feature for r in rows}) == 1 else svg_path.with_name(
                    f"{svg_path.stem}_{_slug(feature)}{svg_path.suffix}"
                )
                with open(target, "w") as fh:
                    emit_chart(subset, metric, fh)
        else:
            with open(svg_path, "w") as fh:
                emit_chart(rows, metric, fh)


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in text).strip("_")
