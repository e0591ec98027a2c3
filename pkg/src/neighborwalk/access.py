"""Simulated social-network API with a per-fetch query cost.

A fetch of node ``v`` returns the concatenated friend/follower list of ``v``
where every entry already carries that neighbor's degrees and properties.
Only the first fetch of a node is charged; later fetches hit the cache.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graph import DirectedGraph
from .labeling import PropertyMap


class BudgetExhausted(RuntimeError):
    pass


@dataclass(frozen=True, slots=True)
class NeighborInfo:
    node: int
    d_out: int
    d_in: int
    properties: Mapping[str, float] = field(default_factory=dict)

    @property
    def d_sum(self) -> int:
        return self.d_out + self.d_in


class ProfileTable:
    """What the API would report about every node, indexed by node id.

    Also memoizes each node's neighbor list.  Both are immutable, so one
    table can back any number of sessions; the sessions still do their own
    query accounting.
    """

    def __init__(self, graph: DirectedGraph, properties: Iterable[PropertyMap] = ()):
        props = list(properties)
        for p in props:
            if len(p) != graph.n:
                raise ValueError(f"property {p.name!r} has {len(p)} values for {graph.n} nodes")
        columns = [(p.name, p.values.tolist()) for p in props]
        d_out = graph.out_degrees.tolist()
        d_in = graph.in_degrees.tolist()
        self.graph = graph
        self.infos = tuple(
            NeighborInfo(v, d_out[v], d_in[v], {name: col[v] for name, col in columns}) for v in range(graph.n)
        )
        self._neighborhoods: dict[int, tuple[NeighborInfo, ...]] = {}

    def __len__(self) -> int:
        return len(self.infos)

    def __getitem__(self, v: int) -> NeighborInfo:
        return self.infos[v]

    def neighborhood(self, v: int) -> tuple[NeighborInfo, ...]:
        hood = self._neighborhoods.get(v)
        if hood is None:
            hood = tuple(map(self.infos.__getitem__, self.graph.neighbor_multiset(v)))
            self._neighborhoods[v] = hood
        return hood


def profile_table(graph: DirectedGraph, properties: Iterable[PropertyMap] = ()) -> ProfileTable:
    return ProfileTable(graph, properties)


class ApiSession:
    """Cost-accounting access to a graph.

    ``budget=None`` removes the query cap, which is only useful for
    step-limited walks on small graphs.  Pass a prebuilt ``table`` to share it
    across sessions; ``properties`` is then ignored.
    """

    def __init__(
        self,
        graph: DirectedGraph,
        properties: Iterable[PropertyMap] = (),
        budget: int | None = None,
        table: ProfileTable | None = None,
    ):
        if budget is not None and budget < 1:
            raise ValueError("budget must be >= 1")
        self.graph = graph
        self.table = table if table is not None else ProfileTable(graph, properties)
        if self.table.graph is not graph:
            raise ValueError("profile table was built for a different graph")
        self.budget = budget
        self.query_count = 0
        self._cache: dict[int, tuple[NeighborInfo, ...]] = {}

    @property
    def exhausted(self) -> bool:
        """Budget spent, or (under a budget) nothing left in the graph to fetch."""
        if self.budget is None:
            return False
        return self.query_count >= min(self.budget, self.graph.n)

    def fetch_neighbors(self, v: int) -> tuple[NeighborInfo, ...]:
        cached = self._cache.get(v)
        if cached is not None:
            return cached
        if not 0 <= v < self.graph.n:
            raise IndexError(f"node id {v} out of range")
        if self.exhausted:
            raise BudgetExhausted(f"query budget {self.budget} used up; cannot fetch node {v}")
        infos = self.table.neighborhood(v)
        self._cache[v] = infos
        self.query_count += 1
        return infos

    def is_cached(self, v: int) -> bool:
        return v in self._cache

    def queries_used(self) -> int:
        return self.query_count

    def observed(self) -> set[int]:
        """Fetched nodes plus every node that appeared in a fetched list."""
        seen = set(self._cache)
        for infos in self._cache.values():
            seen.update(e.node for e in infos)
        return seen

    def profile(self, v: int) -> NeighborInfo:
        """Degrees and properties of a node already seen through the API."""
        if v not in self._cache and not any(e.node == v for infos in self._cache.values() for e in infos):
            raise KeyError(f"node {v} has not been observed in this session")
        return self.table[v]
