"""Feature estimators over walk output, plus exact population means."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Protocol

import numpy as np

from .access import NeighborInfo
from .graph import DirectedGraph
from .labeling import PropertyMap
from .samplers import SampleSequence


class EstimateError(ValueError):
    pass


class UnknownFeatureError(KeyError):
    pass


class NodeView(Protocol):
    d_out: int
    d_in: int
    properties: Mapping[str, float]


@dataclass(frozen=True)
class FeatureFn:
    """A node feature computable from what the API reveals about a node."""

    name: str
    fn: Callable[[NodeView], float]

    def __call__(self, node: NodeView) -> float:
        return float(self.fn(node))

    def scaled(self, c: float) -> "FeatureFn":
        return FeatureFn(f"{c}*{self.name}", lambda x: c * self.fn(x))


@dataclass(frozen=True)
class Estimate:
    value: float
    sample_size: int
    weight_sum: float


out_degree = FeatureFn("out_degree", lambda x: x.d_out)
constant_one = FeatureFn("one", lambda x: 1.0)


def label_rate(name: str) -> FeatureFn:
    def fn(x: NodeView) -> float:
        try:
            return x.properties[name]
        except KeyError:
            raise UnknownFeatureError(f"no property named {name!r}") from None

    return FeatureFn(f"label:{name}", fn)


def out_degree_indicator(d: int) -> FeatureFn:
    return FeatureFn(f"out_degree=={d}", lambda x: 1.0 if x.d_out == d else 0.0)


DEFAULT_LABELS = ("random", "high_degree", "low_degree")


def builtin_features(labels: Iterable[str] = DEFAULT_LABELS) -> list[FeatureFn]:
    return [out_degree, *(label_rate(name) for name in labels)]


def feature_from_name(name: str) -> FeatureFn:
    """Parse ``out_degree``, ``label:<property>`` or ``out_degree==<d>``."""
    if name == "out_degree":
        return out_degree
    if name.startswith("label:") and len(name) > 6:
        return label_rate(name[6:])
    if name.startswith("out_degree=="):
        try:
            return out_degree_indicator(int(name[12:]))
        except ValueError:
            pass
    raise UnknownFeatureError(f"unknown feature {name!r}")


def _node_counts(seq: SampleSequence):
    if len(seq) == 0:
        raise EstimateError("cannot estimate from an empty sample sequence")
    uniq, counts = np.unique(np.asarray(seq.nodes, dtype=np.int64), return_counts=True)
    profiles = [seq.profiles[v] for v in uniq.tolist()]
    d_sum = np.array([p.d_sum for p in profiles], dtype=float)
    if np.any(d_sum < 1):
        raise EstimateError("sampled node with zero total degree")
    return profiles, counts, d_sum


def _weights(seq: SampleSequence, reweight: bool):
    profiles, counts, d_sum = _node_counts(seq)
    return profiles, (counts / d_sum if reweight else counts.astype(float))


def _weighted(profiles, w, f: FeatureFn, n: int) -> Estimate:
    values = np.array([f(p) for p in profiles], dtype=float)
    weight_sum = float(w.sum())
    # offset by the first value so a constant feature comes back exactly
    base = values[0]
    return Estimate(float(base + np.dot(w, values - base) / weight_sum), n, weight_sum)


def reweighted_estimate(seq: SampleSequence, f: FeatureFn) -> Estimate:
    """Weighted mean of ``f`` with weight ``1/d_sum`` on every record, of either kind."""
    profiles, w = _weights(seq, True)
    return _weighted(profiles, w, f, len(seq))


def mean_estimate(seq: SampleSequence, f: FeatureFn) -> Estimate:
    profiles, w = _weights(seq, False)
    return _weighted(profiles, w, f, len(seq))


def estimate_all(seq: SampleSequence, features: Iterable[FeatureFn]) -> list[Estimate]:
    """Estimate several features from one walk, choosing the estimator by walker.

    MHRW samples nodes uniformly and takes a plain mean; every other walker
    samples in proportion to ``d_sum`` and is reweighted.
    """
    profiles, w = _weights(seq, seq.walker != "mhrw")
    return [_weighted(profiles, w, f, len(seq)) for f in features]


def estimate(seq: SampleSequence, f: FeatureFn) -> Estimate:
    return estimate_all(seq, [f])[0]


class ReweightedAccumulator:
    """Running form of :func:`reweighted_estimate` for walks too long to keep."""

    def __init__(self):
        self.weighted_total = 0.0
        self.weight_sum = 0.0
        self.sample_size = 0

    def add(self, d_sum: int, value: float) -> None:
        w = 1.0 / d_sum
        self.weighted_total += w * value
        self.weight_sum += w
        self.sample_size += 1

    def result(self) -> Estimate:
        if self.sample_size == 0:
            raise EstimateError("no samples accumulated")
        return Estimate(self.weighted_total / self.weight_sum, self.sample_size, self.weight_sum)


def degree_distribution_estimate(seq: SampleSequence, reweight: bool = True) -> dict[int, float]:
    """Estimated P(d_out = d) for every out-degree seen in the sample.

    All indicators share one normalization, so the values sum to one.
    """
    if len(seq) == 0:
        raise EstimateError("cannot estimate from an empty sample sequence")
    uniq, counts = np.unique(np.asarray(seq.nodes, dtype=np.int64), return_counts=True)
    profiles = [seq.profiles[v] for v in uniq.tolist()]
    d_out = np.array([p.d_out for p in profiles])
    w = counts.astype(float)
    if reweight:
        w = w / np.array([p.d_sum for p in profiles], dtype=float)
    total = w.sum()
    return {int(d): float(w[d_out == d].sum() / total) for d in np.unique(d_out)}


def node_profiles(g: DirectedGraph, props: Iterable[PropertyMap] = ()) -> list[NeighborInfo]:
    props = list(props)
    d_out = g.out_degrees.tolist()
    d_in = g.in_degrees.tolist()
    return [NeighborInfo(v, d_out[v], d_in[v], {p.name: p[v] for p in props}) for v in range(g.n)]


def exact_expectation(g: DirectedGraph, props: Iterable[PropertyMap], f: FeatureFn) -> float:
    """Population mean of ``f`` over all nodes of ``g``."""
    return float(np.mean([f(p) for p in node_profiles(g, props)]))
