"""Directed graph storage, edge-list ingestion and the DBA generator.

Neighbor lists are kept in CSR form (one index array plus offsets for each
direction) so that million-edge graphs stay compact.  Node ids are dense
``0..n-1``; the original ids from an edge-list file survive in
:attr:`DirectedGraph.labels`.
"""

from __future__ import annotations

import io
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


class GraphFormatError(ValueError):
    """A line of an edge list could not be parsed."""

    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


class EmptyGraphError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeSummary:
    d_out: int
    d_in: int
    d_sum: int
    d_in_out: int


def _csr(rows: np.ndarray, cols: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((cols, rows))
    indices = cols[order].astype(np.int64)
    counts = np.bincount(rows, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


class DirectedGraph:
    """Immutable simple directed graph.

    ``src``/``dst`` must already be dense ids without self-loops or duplicate
    pairs; use :func:`from_edges` for raw input.
    """

    def __init__(self, n: int, src: np.ndarray, dst: np.ndarray, labels: Sequence[int] | None = None):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if n < 1:
            raise EmptyGraphError("graph has no nodes")
        if src.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise ValueError("edge endpoint out of range")
        self.n = int(n)
        self._out_ptr, self._out_idx = _csr(src, dst, self.n)
        self._in_ptr, self._in_idx = _csr(dst, src, self.n)
        self.edge_count = int(src.size)
        self.labels: tuple[int, ...] = tuple(range(self.n)) if labels is None else tuple(int(x) for x in labels)
        if len(self.labels) != self.n:
            raise ValueError("labels must have one entry per node")
        rows = np.repeat(np.arange(self.n), np.diff(self._out_ptr))
        if np.any(rows == self._out_idx):
            raise ValueError("self-loops are not allowed")
        if np.any((np.diff(rows) == 0) & (np.diff(self._out_idx) == 0)):
            raise ValueError("duplicate edges are not allowed")

    # -- basic accessors -------------------------------------------------

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, edges={self.edge_count})"

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"node id {v} out of range for graph with {self.n} nodes")

    def out_neighbors(self, v: int) -> list[int]:
        self._check(v)
        return self._out_idx[self._out_ptr[v] : self._out_ptr[v + 1]].tolist()

    def in_neighbors(self, v: int) -> list[int]:
        self._check(v)
        return self._in_idx[self._in_ptr[v] : self._in_ptr[v + 1]].tolist()

    @property
    def out_degrees(self) -> np.ndarray:
        return np.diff(self._out_ptr)

    @property
    def in_degrees(self) -> np.ndarray:
        return np.diff(self._in_ptr)

    @property
    def sum_degrees(self) -> np.ndarray:
        return self.out_degrees + self.in_degrees

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(src, dst)`` arrays sorted by source then target."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self._out_ptr))
        return src, self._out_idx.copy()

    def node_of(self, label: int) -> int:
        """Dense id of an original node id."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.labels == other.labels
            and np.array_equal(self._out_ptr, other._out_ptr)
            and np.array_equal(self._out_idx, other._out_idx)
        )

    __hash__ = None  # type: ignore[assignment]

    # -- degree semantics ------------------------------------------------

    def degrees(self, v: int) -> DegreeSummary:
        self._check(v)
        d_out = int(self._out_ptr[v + 1] - self._out_ptr[v])
        d_in = int(self._in_ptr[v + 1] - self._in_ptr[v])
        reciprocal = np.intersect1d(
            self._out_idx[self._out_ptr[v] : self._out_ptr[v + 1]],
            self._in_idx[self._in_ptr[v] : self._in_ptr[v + 1]],
            assume_unique=True,
        )
        return DegreeSummary(d_out, d_in, d_out + d_in, int(reciprocal.size))

    def neighbor_multiset(self, v: int) -> list[int]:
        """Out-neighbors followed by in-neighbors; reciprocal neighbors appear twice."""
        return self.out_neighbors(v) + self.in_neighbors(v)

    def _has_edge(self, i: int, j: int) -> bool:
        row = self._out_idx[self._out_ptr[i] : self._out_ptr[i + 1]]
        k = np.searchsorted(row, j)
        return bool(k < row.size and row[k] == j)

    def multiplicity(self, i: int, j: int) -> int:
        """Number of directed edges between ``i`` and ``j`` in either direction."""
        self._check(i)
        self._check(j)
        if i == j:
            return 0
        return int(self._has_edge(i, j)) + int(self._has_edge(j, i))


# -- ingestion ------------------------------------------------------------


def from_edges(pairs: Iterable[tuple[int, int]]) -> DirectedGraph:
    """Build a graph from raw ``(src, dst)`` pairs of arbitrary integer ids.

    Self-loops are dropped, duplicates collapse, and ids are densified in
    ascending order of the original id.
    """
    arr = np.array(list(pairs), dtype=np.int64).reshape(-1, 2)
    arr = arr[arr[:, 0] != arr[:, 1]]
    if arr.size == 0:
        raise EmptyGraphError("no edges left after dropping self-loops")
    arr = np.unique(arr, axis=0)
    labels, inverse = np.unique(arr, return_inverse=True)
    inverse = inverse.reshape(arr.shape)
    return DirectedGraph(labels.size, inverse[:, 0], inverse[:, 1], labels.tolist())


def load_edge_list(text: str | Iterable[str]) -> DirectedGraph:
    """Parse a SNAP-style edge list.

    ``text`` is either the whole file contents or an iterable of lines (an
    open file works).  Lines starting with ``#`` and blank lines are skipped.
    """
    lines = io.StringIO(text) if isinstance(text, str) else text
    pairs = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(lineno, line, "expected two tokens")
        try:
            src, dst = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(lineno, line, "non-integer node id") from None
        pairs.append((src, dst))
    return from_edges(pairs)


def write_edge_list(g: DirectedGraph, sink) -> None:
    """Write ``g`` as an edge list using the original node ids."""
    src, dst = g.edges()
    labels = g.labels
    sink.write(f"# nodes: {g.n} edges: {g.edge_count}\n")
    for s, d in zip(src.tolist(), dst.tolist()):
        sink.write(f"{labels[s]}\t{labels[d]}\n")


def induced_subgraph(g: DirectedGraph, nodes: Sequence[int]) -> DirectedGraph:
    keep = np.asarray(sorted(nodes), dtype=np.int64)
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    src, dst = g.edges()
    mask = (remap[src] >= 0) & (remap[dst] >= 0)
    return DirectedGraph(keep.size, remap[src[mask]], remap[dst[mask]], [g.labels[v] for v in keep.tolist()])


def largest_weakly_connected_component(g: DirectedGraph) -> DirectedGraph:
    """Induced subgraph on the largest weak component.

    Ties go to the component holding the smallest original id.
    """
    src, dst = g.edges()
    adj = coo_matrix((np.ones(src.size), (src, dst)), shape=(g.n, g.n))
    ncomp, comp = connected_components(adj, directed=True, connection="weak")
    if ncomp == 1:
        return g
    sizes = np.bincount(comp, minlength=ncomp)
    labels = np.asarray(g.labels)
    min_label = np.full(ncomp, np.iinfo(np.int64).max)
    np.minimum.at(min_label, comp, labels)
    best = min(range(ncomp), key=lambda c: (-sizes[c], min_label[c]))
    return induced_subgraph(g, np.flatnonzero(comp == best).tolist())


def is_weakly_connected(g: DirectedGraph) -> bool:
    src, dst = g.edges()
    adj = coo_matrix((np.ones(src.size), (src, dst)), shape=(g.n, g.n))
    return connected_components(adj, directed=True, connection="weak")[0] == 1


# -- generator ------------------------------------------------------------


def dba_seed_size(edges_per_node: int) -> int:
    return max(edges_per_node, 3)


def generate_dba(n: int, edges_per_node: int, A: float = 1.0, seed: int = 0) -> DirectedGraph:
    """Directed Barabasi-Albert graph.

    Starts from a directed cycle over ``max(edges_per_node, 3)`` nodes.  Each
    new node sends ``edges_per_node`` edges to distinct existing nodes, each
    target drawn with probability proportional to ``d_in + A`` as it stood
    before the new node arrived.
    """
    if edges_per_node < 1:
        raise ValueError("edges_per_node must be >= 1")
    if A < 0:
        raise ValueError("A must be non-negative")
    n0 = dba_seed_size(edges_per_node)
    if n < n0:
        raise ValueError(f"n must be at least the seed size {n0}")
    rng = random.Random(seed)
    src = list(range(n0))
    dst = [(v + 1) % n0 for v in range(n0)]
    # one entry per unit of in-degree: uniform picks from it are in-degree proportional
    targets = list(dst)
    for v in range(n0, n):
        total = len(targets) + A * v
        chosen: list[int] = []
        while len(chosen) < edges_per_node:
            u = rng.random() * total
            if u < len(targets):
                t = targets[int(u)]
            else:
                t = min(int((u - len(targets)) / A), v - 1)
            if t not in chosen:
                chosen.append(t)
        src.extend([v] * edges_per_node)
        dst.extend(chosen)
        targets.extend(chosen)
    return DirectedGraph(n, np.array(src), np.array(dst))
