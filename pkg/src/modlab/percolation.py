"""Partial observation machinery: edge percolation, vertex sampling,
cut distance, and blow-ups."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, Partition, WeightFunction
from .modularity import EnumerationCapError
from .generators import rng_from
from .search import exact_modularity

__all__ = [
    "PercolationRun",
    "VertexSample",
    "ProbeSummary",
    "percolate",
    "percolate_run",
    "percolate_weighted",
    "vertex_sample",
    "cut_distance",
    "blow_up",
    "estimability_probe",
    "CUT_DISTANCE_CAP",
]

CUT_DISTANCE_CAP = 12


@dataclass(frozen=True)
class PercolationRun:
    """One percolation draw: which edges of the underlying graph survived."""

    underlying: Graph
    retained: tuple[bool, ...]
    p: float
    seed: int

    @property
    def observed(self) -> Graph:
        return Graph(
            self.underlying.n,
            tuple(e for e, kept in zip(self.underlying.edges, self.retained) if kept),
        )

    @property
    def deleted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            e for e, kept in zip(self.underlying.edges, self.retained) if not kept
        )


def percolate_run(graph: Graph, p: float, seed: int) -> PercolationRun:
    """Keep each edge independently with probability p; record the mask."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must be in [0, 1], got {p}")
    rng = rng_from(seed)
    mask = rng.random(graph.m) < p
    return PercolationRun(graph, tuple(bool(b) for b in mask), p, seed)


def percolate(graph: Graph, p: float, seed: int) -> Graph:
    """The observed subgraph of a percolation draw (same vertex set)."""
    return percolate_run(graph, p, seed).observed


def percolate_weighted(weights: WeightFunction, seed: int) -> Graph:
    """Draw a simple graph including each pair uv with probability w[u, v].

    The diagonal is ignored: the output carries no loops. Weights must be
    probabilities (at most 1).
    """
    if not weights.is_probability():
        raise ValueError("weight entries above 1 are not probabilities")
    n = weights.n
    rng = rng_from(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < weights.matrix[iu, ju]
    return Graph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist())))


@dataclass(frozen=True)
class VertexSample:
    """Induced subgraph on a uniform k-subset, relabelled 0..k-1."""

    graph: Graph
    vertices: tuple[int, ...]  # vertices[i] = original id of new vertex i


def vertex_sample(graph: Graph, k: int, seed: int) -> VertexSample:
    if not (1 <= k <= graph.n):
        raise ValueError(f"k must be in 1..{graph.n}, got {k}")
    rng = rng_from(seed)
    chosen = np.sort(rng.choice(graph.n, size=k, replace=False))
    sub, mapping = graph.induced_subgraph([int(v) for v in chosen])
    return VertexSample(sub, mapping)


def _existence_adjacency(graph: Graph) -> np.ndarray:
    a = np.zeros((graph.n, graph.n), dtype=np.int64)
    for u, v in graph.edges:
        a[u, v] = 1
        a[v, u] = 1
    return a


def cut_distance(graph: Graph, other: Graph, cap: int = CUT_DISTANCE_CAP) -> float:
    """Exact cut distance between two graphs on the same vertex set.

    max over subset pairs (S, T) of the discrepancy in ordered-pair edge
    counts, normalized by n^2. For each S the optimal T is read off the
    signs of the column sums, so the scan is over subsets S only.
    """
    if graph.n != other.n:
        raise ValueError("cut distance needs a common vertex set")
    n = graph.n
    if n > cap:
        raise EnumerationCapError(f"cut-distance enumeration at n={n} exceeds cap {cap}")
    diff = _existence_adjacency(graph) - _existence_adjacency(other)
    best = 0
    col = np.zeros(n, dtype=np.int64)
    inside = [False] * n
    for i in range(1, 1 << n):
        v = (i & -i).bit_length() - 1
        if inside[v]:
            inside[v] = False
            col -= diff[v]
        else:
            inside[v] = True
            col += diff[v]
        positive = int(col[col > 0].sum())
        negative = int(-col[col < 0].sum())
        best = max(best, positive, negative)
    return best / float(n * n)


def blow_up(graph: Graph, b: int) -> Graph:
    """Replace each vertex by b copies; lift each edge to a complete b x b join.

    Copies of one vertex stay non-adjacent, so the input must be simple
    and loopless. Vertex and edge counts scale by b and b^2.
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    if not graph.is_simple():
        raise ValueError("blow-up requires a simple, loopless graph")
    edges = []
    for u, v in graph.edges:
        for i in range(b):
            for j in range(b):
                edges.append((u * b + i, v * b + j))
    return Graph(graph.n * b, tuple(edges))


@dataclass(frozen=True)
class ProbeSummary:
    """Monte-Carlo distribution of exact modularity over sampled subgraphs."""

    mean: float
    deviation: float
    values: tuple[float, ...]
    reference: float | None  # exact modularity of the full graph when feasible


def estimability_probe(graph: Graph, k: int, trials: int, seed: int) -> ProbeSummary:
    """Sample induced k-subgraphs and solve each exactly.

    A probe, not a prover: it reports the empirical distribution of the
    sampled modularity next to the full graph's value (when the full graph
    is small enough to solve).
    """
    if k > 10:
        raise EnumerationCapError("probe subgraphs above k=10 are not brute-forceable")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    values = []
    for t in range(trials):
        sample = vertex_sample(graph, k, seed=_combine(seed, t))
        if sample.graph.m == 0:
            values.append(0.0)
        else:
            values.append(exact_modularity(sample.graph, cap=10).score.q)
    reference = None
    if graph.n <= 12 and graph.m >= 1:
        reference = exact_modularity(graph).score.q
    arr = np.asarray(values)
    return ProbeSummary(float(arr.mean()), float(arr.std()), tuple(values), reference)


def _combine(seed: int, trial: int) -> int:
    # distinct per-trial streams from one seed, stable across trial counts
    return int(np.random.SeedSequence(seed, spawn_key=(trial,)).generate_state(1)[0])
