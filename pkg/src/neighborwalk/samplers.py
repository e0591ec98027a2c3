"""Random-walk samplers driven through an :class:`ApiSession`.

Every walker emits the start node first, stops as soon as the session's query
budget is spent (or after ``max_records`` records, whichever comes first), and
picks neighbors by a uniform index into the fetched neighbor list, so a
reciprocal neighbor is twice as likely as a one-way one.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .access import ApiSession, NeighborInfo

TRANSITION = 0
NEIGHBOR = 1
KIND_NAMES = ("transition", "neighbor")


@dataclass(frozen=True)
class SampleRecord:
    node: int
    d_out: int
    d_in: int
    properties: Mapping[str, float]
    kind: str

    @property
    def d_sum(self) -> int:
        return self.d_out + self.d_in


class SampleSequence:
    """Output of one walk.

    Records are stored as parallel node/kind arrays plus the profile of every
    observed node; :class:`SampleRecord` objects are built on demand.
    """

    def __init__(
        self,
        nodes: list[int],
        kinds: bytearray,
        profiles: Sequence[NeighborInfo] | Mapping[int, NeighborInfo],
        queries_used: int,
        walker: str,
        alpha: float | None = None,
        staying: list[int] | None = None,
    ):
        self.nodes = nodes
        self.kinds = kinds
        self.profiles = profiles
        self.queries_used = queries_used
        self.walker = walker
        self.alpha = alpha
        self.staying = staying

    def __len__(self) -> int:
        return len(self.nodes)

    def record(self, i: int) -> SampleRecord:
        info = self.profiles[self.nodes[i]]
        return SampleRecord(info.node, info.d_out, info.d_in, info.properties, KIND_NAMES[self.kinds[i]])

    def __iter__(self) -> Iterator[SampleRecord]:
        return (self.record(i) for i in range(len(self.nodes)))

    @property
    def records(self) -> list[SampleRecord]:
        return list(self)

    def prefix(self, t: int) -> "SampleSequence":
        """The first ``t`` records, sharing profiles with this sequence."""
        staying = self.staying[:t] if self.staying is not None else None
        return SampleSequence(self.nodes[:t], self.kinds[:t], self.profiles, self.queries_used, self.walker, self.alpha, staying)

    def count(self, kind: str) -> int:
        return self.kinds.count(KIND_NAMES.index(kind))

    def to_csv(self, sink) -> None:
        names = sorted(self.profiles[self.nodes[0]].properties) if self.nodes else []
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["step", "kind", "node", "d_out", "d_in", *names])
        for step, rec in enumerate(self):
            writer.writerow(
                [step, rec.kind, rec.node, rec.d_out, rec.d_in, *(repr(rec.properties[k]) for k in names)]
            )

    @classmethod
    def from_csv(cls, source, walker: str = "unknown", alpha: float | None = None) -> "SampleSequence":
        """Inverse of :meth:`to_csv`.  Query usage is not stored and reads back as 0."""
        reader = csv.reader(source)
        header = next(reader, None)
        if header is None or header[:5] != ["step", "kind", "node", "d_out", "d_in"]:
            raise ValueError("not a sample-sequence CSV")
        names = header[5:]
        nodes: list[int] = []
        kinds = bytearray()
        profiles: dict[int, NeighborInfo] = {}
        for row in reader:
            node = int(row[2])
            nodes.append(node)
            kinds.append(KIND_NAMES.index(row[1]))
            if node not in profiles:
                props = {k: float(x) for k, x in zip(names, row[5:])}
                profiles[node] = NeighborInfo(node, int(row[3]), int(row[4]), props)
        return cls(nodes, kinds, profiles, 0, walker, alpha)


def _as_rng(rng: random.Random | int | None) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    return random.Random(rng)


def _check_limits(session: ApiSession, start: int, max_records: int | None) -> None:
    if session.budget is None and max_records is None:
        raise ValueError("walk needs a query budget or max_records to terminate")
    if max_records is not None and max_records < 1:
        raise ValueError("max_records must be >= 1")
    if not 0 <= start < session.graph.n:
        raise IndexError(f"start node {start} out of range")


def _finish(session, nodes, kinds, walker, alpha=None, staying=None) -> SampleSequence:
    # sampled nodes are observed by construction, so the shared table is safe to hand out
    return SampleSequence(nodes, kinds, session.table, session.queries_used(), walker, alpha, staying)


def proposed_walk(
    session: ApiSession,
    start: int,
    alpha: float,
    rng: random.Random | int | None = None,
    max_records: int | None = None,
    trace_staying: bool = False,
) -> SampleSequence:
    """Random walk that also samples cached neighbors for free.

    At each staying node, with probability ``alpha`` (repeated until a draw
    fails) a uniform entry of the neighbor list is appended as a ``neighbor``
    record; then the walk moves to a uniform entry, paying one query if that
    node is new.  With ``trace_staying`` the staying node behind every record
    is kept in ``SampleSequence.staying``.
    """
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    _check_limits(session, start, max_records)
    limit = max_records if max_records is not None else float("inf")
    rand = _as_rng(rng).random

    infos = session.fetch_neighbors(start)
    stay = start
    nodes = [start]
    kinds = bytearray([TRANSITION])
    staying = [start] if trace_staying else None
    while not session.exhausted and len(nodes) < limit:
        k = len(infos)
        # alpha == 0 skips the draw entirely so the stream matches srw_walk
        while alpha > 0 and rand() < alpha and len(nodes) < limit:
            nodes.append(infos[int(rand() * k)].node)
            kinds.append(NEIGHBOR)
            if staying is not None:
                staying.append(stay)
        if len(nodes) >= limit:
            break
        stay = infos[int(rand() * k)].node
        infos = session.fetch_neighbors(stay)
        nodes.append(stay)
        kinds.append(TRANSITION)
        if staying is not None:
            staying.append(stay)
    return _finish(session, nodes, kinds, "proposed", alpha, staying)


def srw_walk(
    session: ApiSession,
    start: int,
    rng: random.Random | int | None = None,
    max_records: int | None = None,
) -> SampleSequence:
    _check_limits(session, start, max_records)
    limit = max_records if max_records is not None else float("inf")
    rand = _as_rng(rng).random

    infos = session.fetch_neighbors(start)
    nodes = [start]
    while not session.exhausted and len(nodes) < limit:
        v = infos[int(rand() * len(infos))].node
        infos = session.fetch_neighbors(v)
        nodes.append(v)
    return _finish(session, nodes, bytearray(len(nodes)), "srw")


def nbrw_walk(
    session: ApiSession,
    start: int,
    rng: random.Random | int | None = None,
    max_records: int | None = None,
) -> SampleSequence:
    """Non-backtracking walk on the neighbor multiset.

    One occurrence of the previous node is removed before the uniform draw,
    so a reciprocal predecessor can still be chosen through its other entry.
    A node with a single entry forces the walk back.
    """
    _check_limits(session, start, max_records)
    limit = max_records if max_records is not None else float("inf")
    rand = _as_rng(rng).random

    infos = session.fetch_neighbors(start)
    ids_of: dict[int, list[int]] = {}
    prev = -1
    cur = start
    nodes = [start]
    while not session.exhausted and len(nodes) < limit:
        k = len(infos)
        if prev < 0 or k == 1:
            nxt = infos[int(rand() * k)].node
        else:
            ids = ids_of.get(cur)
            if ids is None:
                ids = ids_of[cur] = [e.node for e in infos]
            skip = ids.index(prev)
            r = int(rand() * (k - 1))
            if r >= skip:
                r += 1
            nxt = infos[r].node
        prev, cur = cur, nxt
        infos = session.fetch_neighbors(cur)
        nodes.append(cur)
    return _finish(session, nodes, bytearray(len(nodes)), "nbrw")


def mhrw_walk(
    session: ApiSession,
    start: int,
    rng: random.Random | int | None = None,
    max_records: int | None = None,
) -> SampleSequence:
    """Metropolis-Hastings walk with a uniform target law.

    A proposal ``j`` from ``i`` is accepted with probability
    ``min(1, d_sum(i) / d_sum(j))``; the proposal's degree comes from the
    fetched list, so rejections are free.  A rejection re-emits ``i``.
    """
    _check_limits(session, start, max_records)
    limit = max_records if max_records is not None else float("inf")
    rand = _as_rng(rng).random

    infos = session.fetch_neighbors(start)
    cur = start
    nodes = [start]
    while not session.exhausted and len(nodes) < limit:
        k = len(infos)
        cand = infos[int(rand() * k)]
        if rand() * cand.d_sum < k:
            cur = cand.node
            infos = session.fetch_neighbors(cur)
        nodes.append(cur)
    return _finish(session, nodes, bytearray(len(nodes)), "mhrw")


WALKERS = {
    "proposed": proposed_walk,
    "srw": srw_walk,
    "nbrw": nbrw_walk,
    "mhrw": mhrw_walk,
}


def run_walker(
    name: str,
    session: ApiSession,
    start: int,
    rng: random.Random | int | None = None,
    alpha: float = 0.0,
    max_records: int | None = None,
) -> SampleSequence:
    if name not in WALKERS:
        raise ValueError(f"unknown walker {name!r}; choose from {sorted(WALKERS)}")
    if name == "proposed":
        return proposed_walk(session, start, alpha, rng, max_records)
    return WALKERS[name](session, start, rng, max_records)
