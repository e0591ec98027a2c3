"""Synthetic binary labels biased toward high- or low-degree nodes."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import DirectedGraph


class LabelMode(str, enum.Enum):
    RANDOM = "random"
    HIGH_DEGREE = "high_degree"
    LOW_DEGREE = "low_degree"


@dataclass(frozen=True)
class PropertyMap:
    """A per-node real-valued property, indexed by dense node id."""

    name: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, v: int) -> float:
        return float(self.values[v])

    def write(self, sink, ids: Sequence[int] | None = None) -> None:
        """Two columns ``node_id value``; ``ids`` maps dense ids to the ones written."""
        for v, x in enumerate(self.values.tolist()):
            sink.write(f"{v if ids is None else ids[v]} {x:g}\n")

    @classmethod
    def read(cls, name: str, lines: Iterable[str], g: DirectedGraph | None = None) -> "PropertyMap":
        """Inverse of :meth:`write`; with ``g`` the ids are original ids of ``g``."""
        pairs = []
        for lineno, line in enumerate(lines, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'node_id value'")
            pairs.append((int(parts[0]), float(parts[1])))
        if g is None:
            size = max((v for v, _ in pairs), default=-1) + 1
            index = {v: v for v, _ in pairs}
        else:
            size = g.n
            index = {label: v for v, label in enumerate(g.labels)}
        values = np.full(size, np.nan)
        for node, x in pairs:
            if node in index:
                values[index[node]] = x
        if np.isnan(values).any():
            raise ValueError(f"property {name!r} is missing values for some nodes")
        return cls(name, values)


def _raw_effective_degrees(g: DirectedGraph) -> np.ndarray:
    return np.maximum(g.in_degrees, g.out_degrees)


def effective_degree(g: DirectedGraph, v: int) -> int:
    """``max(d_in, d_out)``, floored at 1 for isolated nodes."""
    d = g.degrees(v)
    return max(d.d_in, d.d_out, 1)


def label_weights(g: DirectedGraph, mode: LabelMode | str) -> np.ndarray:
    """Normalized per-draw selection probabilities for ``mode``."""
    mode = LabelMode(mode)
    h = _raw_effective_degrees(g).astype(float)
    if mode is LabelMode.RANDOM:
        w = np.ones(g.n)
    elif mode is LabelMode.HIGH_DEGREE:
        w = h
    else:
        w = np.divide(1.0, h, out=np.zeros_like(h), where=h > 0)
    return w / w.sum()


def assign_labels(
    g: DirectedGraph, mode: LabelMode | str, fraction: float, seed: int, name: str | None = None
) -> PropertyMap:
    """Label exactly ``ceil(fraction * n)`` nodes with 1.0.

    Nodes are drawn one at a time from the mode's weights; a draw that hits an
    already-labeled node is simply repeated.
    """
    mode = LabelMode(mode)
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    target = math.ceil(fraction * g.n - 1e-9)
    if target < 1:
        raise ValueError("fraction too small to label a single node")
    p = label_weights(g, mode)
    if np.count_nonzero(p) < target:
        raise ValueError("not enough nodes with positive weight to reach the target")
    rng = np.random.default_rng(seed)
    labeled = np.zeros(g.n, dtype=bool)
    count = 0
    while count < target:
        for v in rng.choice(g.n, size=max(64, 2 * (target - count)), p=p).tolist():
            if not labeled[v]:
                labeled[v] = True
                count += 1
                if count == target:
                    break
    return PropertyMap(name or mode.value, labeled.astype(float))


def degree_property(g: DirectedGraph, which: str = "out") -> PropertyMap:
    values = {"out": g.out_degrees, "in": g.in_degrees, "sum": g.sum_degrees}[which]
    return PropertyMap(f"d_{which}", values)
