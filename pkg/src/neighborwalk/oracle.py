"""Brute-force Markov-chain checks of the neighbor-sampling walk on small graphs.

The walk's state is a (staying, sampling) pair.  Pairs ``(i, i)`` are
transition samples, pairs ``(i, j)`` with ``j`` adjacent to ``i`` are neighbor
samples.  Everything here is dense linear algebra and meant for graphs with at
most a few hundred states.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .estimators import FeatureFn, node_profiles
from .graph import DirectedGraph, from_edges
from .labeling import PropertyMap

MAX_STATES = 2000


class ConvergenceError(RuntimeError):
    pass


@dataclass
class StateSpace:
    states: list[tuple[int, int]]
    index: dict[tuple[int, int], int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def diagonal(self) -> np.ndarray:
        return np.array([i == j for i, j in self.states])


def _adjacent(g: DirectedGraph, i: int) -> list[int]:
    return sorted(set(g.neighbor_multiset(i)))


def enumerate_states(g: DirectedGraph) -> StateSpace:
    states = [(i, i) for i in range(g.n)]
    states += [(i, j) for i in range(g.n) for j in _adjacent(g, i)]
    if len(states) > MAX_STATES:
        raise ValueError(f"{len(states)} states is too many for the dense oracle")
    return StateSpace(states, {s: k for k, s in enumerate(states)})


def _check_alpha(alpha: float) -> None:
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")


def build_transition_matrix(g: DirectedGraph, alpha: float, space: StateSpace | None = None) -> np.ndarray:
    """Row-stochastic matrix over ``space`` (enumerated from ``g`` if omitted)."""
    _check_alpha(alpha)
    space = space or enumerate_states(g)
    P = np.zeros((len(space), len(space)))
    d_sum = g.sum_degrees
    for row, (i, _) in enumerate(space.states):
        for k in _adjacent(g, i):
            share = g.multiplicity(i, k) / d_sum[i]
            P[row, space.index[(i, k)]] += alpha * share
            P[row, space.index[(k, k)]] += (1 - alpha) * share
    return P


def closed_form_stationary(g: DirectedGraph, alpha: float, space: StateSpace | None = None) -> np.ndarray:
    """``alpha*m(i,j)/2|E|`` off the diagonal, ``(1-alpha)*d_sum(i)/2|E|`` on it."""
    _check_alpha(alpha)
    space = space or enumerate_states(g)
    two_e = 2 * g.edge_count
    d_sum = g.sum_degrees
    pi = np.empty(len(space))
    for k, (i, j) in enumerate(space.states):
        pi[k] = (1 - alpha) * d_sum[i] / two_e if i == j else alpha * g.multiplicity(i, j) / two_e
    return pi


def stationary_power_iteration(P: np.ndarray, tol: float = 1e-13, max_iters: int = 1_000_000) -> np.ndarray:
    """Iterate ``x <- x P`` from the uniform vector until the L-inf step is below ``tol``."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("transition matrix must be square")
    if np.any(P < 0) or not np.allclose(P.sum(axis=1), 1.0, atol=1e-12, rtol=0):
        raise ValueError("transition matrix must be row-stochastic")
    x = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(max_iters):
        nxt = x @ P
        if np.max(np.abs(nxt - x)) < tol:
            return nxt / nxt.sum()
        x = nxt
    raise ConvergenceError(f"power iteration did not settle within {max_iters} iterations (periodic or reducible chain?)")


def verify_lemma_mdsum(g: DirectedGraph) -> bool:
    """Integer check that multiplicities around each node add up to its total degree."""
    d_sum = g.sum_degrees
    return all(sum(g.multiplicity(i, j) for j in _adjacent(g, i)) == d_sum[i] for i in range(g.n))


@dataclass(frozen=True)
class IdentityReport:
    feature: str
    alpha: float
    weighted_feature: float  # (2|E|/n) * E_pi(w g)
    uniform_mean: float  # E_u(f)
    weight_mass: float  # (2|E|/n) * E_pi(w)

    @property
    def feature_error(self) -> float:
        return abs(self.weighted_feature - self.uniform_mean)

    @property
    def weight_error(self) -> float:
        return abs(self.weight_mass - 1.0)


def verify_estimator_identities(
    g: DirectedGraph, alpha: float, f: FeatureFn, props: Iterable[PropertyMap] = ()
) -> IdentityReport:
    """Evaluate both limits behind the reweighted estimator with the exact stationary law."""
    space = enumerate_states(g)
    pi = closed_form_stationary(g, alpha, space)
    profiles = node_profiles(g, props)
    sampled = [j for _, j in space.states]
    fvals = np.array([f(profiles[j]) for j in sampled])
    w = np.array([1.0 / profiles[j].d_sum for j in sampled])
    scale = 2 * g.edge_count / g.n
    return IdentityReport(
        feature=f.name,
        alpha=alpha,
        weighted_feature=scale * float(np.dot(pi, w * fvals)),
        uniform_mean=float(np.mean([f(p) for p in profiles])),
        weight_mass=scale * float(np.dot(pi, w)),
    )


# -- test-graph families ---------------------------------------------------

G3_EDGES = ((1, 2), (2, 1), (2, 3))


def g3() -> DirectedGraph:
    """Three users: 1 and 2 follow each other, 2 follows 3."""
    return from_edges(G3_EDGES)


def random_connected_digraph(n: int, seed: int, extra_edge_prob: float = 0.25, reciprocal_prob: float = 0.3) -> DirectedGraph:
    """Small weakly connected digraph: random oriented spanning tree plus extra edges."""
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = random.Random(seed)
    edges: set[tuple[int, int]] = set()

    def add(u: int, v: int) -> None:
        edges.add((u, v) if rng.random() < 0.5 else (v, u))
        if rng.random() < reciprocal_prob:
            edges.add((v, u))
            edges.add((u, v))

    order = list(range(n))
    rng.shuffle(order)
    for k in range(1, n):
        add(order[k], order[rng.randrange(k)])
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < extra_edge_prob:
                add(u, v)
    return from_edges(sorted(edges))


# -- suite -------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.error <= self.tol


def run_suite(
    graphs: Sequence[tuple[str, DirectedGraph, Sequence[PropertyMap]]],
    alphas: Sequence[float] = (0.1, 0.5, 0.9, 0.99),
    features: Sequence[FeatureFn] | None = None,
) -> list[Check]:
    """Every oracle identity for every (graph, alpha) pair."""
    from .estimators import constant_one, label_rate, out_degree, out_degree_indicator

    checks = []
    for gname, g, props in graphs:
        checks.append(Check(f"{gname}: sum of multiplicities equals d_sum", 0.0 if verify_lemma_mdsum(g) else 1.0, 0.0))
        feats = list(features) if features is not None else [out_degree, constant_one, out_degree_indicator(1)]
        if features is None:
            feats += [label_rate(p.name) for p in props]
        space = enumerate_states(g)
        for alpha in alphas:
            P = build_transition_matrix(g, alpha, space)
            closed = closed_form_stationary(g, alpha, space)
            checks.append(Check(f"{gname} a={alpha}: rows sum to 1", float(np.max(np.abs(P.sum(axis=1) - 1))), 1e-12))
            power = stationary_power_iteration(P)
            checks.append(Check(f"{gname} a={alpha}: power iteration vs closed form", float(np.max(np.abs(power - closed))), 1e-9))
            diag = space.diagonal
            checks.append(Check(f"{gname} a={alpha}: diagonal mass", abs(closed[diag].sum() - (1 - alpha)), 1e-12))
            for f in feats:
                rep = verify_estimator_identities(g, alpha, f, props)
                checks.append(Check(f"{gname} a={alpha} {f.name}: weighted feature identity", rep.feature_error, 1e-12))
                checks.append(Check(f"{gname} a={alpha} {f.name}: weight identity", rep.weight_error, 1e-12))
    return checks


def format_report(checks: Sequence[Check]) -> str:
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.error:.3e}  {c.name}" for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append("all identities pass" if failed == 0 else f"{failed} of {len(checks)} checks failed")
    return "\n".join(lines) + "\n"
