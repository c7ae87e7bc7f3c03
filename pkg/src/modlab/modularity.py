"""Modularity scores, weighted and relative variants, and subset bounds.

The modularity score of a partition is the edge contribution (fraction of
edges inside parts) minus the degree tax (sum of squared part volumes over
(2m)^2). Edge and volume counts are accumulated as exact integers before
any division, so identities between the different formulas hold to full
double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .graph import Graph, Partition, WeightFunction

__all__ = [
    "ModularityBreakdown",
    "RelativeModularityResult",
    "EnumerationCapError",
    "modularity_score",
    "weighted_modularity_score",
    "relative_modularity",
    "partition_score_via_relative",
    "max_relative_modularity",
    "subset_bipartition_bound",
    "expected_random_partition_score",
    "resolution_limit_components",
]

SUBSET_ENUMERATION_CAP = 20


class EnumerationCapError(ValueError):
    """Exhaustive enumeration refused because the instance is too large."""


@dataclass(frozen=True)
class ModularityBreakdown:
    """Score split into its two competing terms: q = edge_contribution - degree_tax."""

    q: float
    edge_contribution: float
    degree_tax: float


@dataclass(frozen=True)
class RelativeModularityResult:
    subset: frozenset[int]
    value: float


_ZERO = ModularityBreakdown(0.0, 0.0, 0.0)


def modularity_score(graph: Graph, partition: Partition) -> ModularityBreakdown:
    """Modularity score of a partition, with its breakdown.

    A graph with no edges scores 0 by convention. Raises ValueError when
    the partition does not cover exactly the graph's vertices.
    """
    if partition.n != graph.n:
        raise ValueError(
            f"partition covers {partition.n} vertices, graph has {graph.n}"
        )
    m = graph.m
    if m == 0:
        return _ZERO
    assign = partition.assignment
    k = partition.k
    internal = 0
    for u, v in graph.edges:
        if assign[u] == assign[v]:
            internal += 1
    vols = [0] * k
    deg = graph.degrees
    for v in range(graph.n):
        vols[assign[v]] += deg[v]
    sq = sum(x * x for x in vols)
    edge_contribution = internal / m
    degree_tax = sq / (4.0 * m * m)
    return ModularityBreakdown(edge_contribution - degree_tax, edge_contribution, degree_tax)


def weighted_modularity_score(weights: WeightFunction, partition: Partition) -> ModularityBreakdown:
    """Modularity score of a partition on a weight function.

    Identically-zero weights score 0 by convention; the score is invariant
    under rescaling the weights by a positive constant.
    """
    if partition.n != weights.n:
        raise ValueError(
            f"partition covers {partition.n} vertices, weights have {weights.n}"
        )
    total = weights.total_weight
    if total == 0.0:
        return _ZERO
    internal = 0.0
    vol_sq = 0.0
    for part in partition.parts:
        idx = sorted(part)
        internal += weights.edge_weight(idx)
        pv = float(weights.degrees[idx].sum())
        vol_sq += pv * pv
    edge_contribution = internal / total
    degree_tax = vol_sq / (4.0 * total * total)
    return ModularityBreakdown(edge_contribution - degree_tax, edge_contribution, degree_tax)


def relative_modularity(graph: Graph, vertices: Iterable[int]) -> float:
    """2 e(A)/vol(A) - vol(A)/2m for a vertex set A with positive volume."""
    if graph.m == 0:
        raise ValueError("relative modularity needs at least one edge")
    subset = set(vertices)
    vol = graph.volume(subset)
    if vol == 0:
        raise ValueError("relative modularity is undefined for zero-volume sets")
    e_in = graph.internal_edges(subset)
    return 2.0 * e_in / vol - vol / (2.0 * graph.m)


def partition_score_via_relative(graph: Graph, partition: Partition) -> float:
    """Volume-weighted average of per-part relative modularities.

    Agrees with modularity_score to within 1e-12; zero-volume parts
    contribute nothing (their relative modularity is undefined).
    """
    if graph.m == 0:
        return 0.0
    if partition.n != graph.n:
        raise ValueError("partition/vertex-count mismatch")
    two_m = 2.0 * graph.m
    score = 0.0
    for part in partition.parts:
        vol = graph.volume(part)
        if vol == 0:
            continue
        score += (vol / two_m) * relative_modularity(graph, part)
    return score


def _iter_subsets(graph: Graph):
    """Yield (subset, internal_edges, volume) for every non-empty subset.

    Gray-code order: each step toggles one vertex, so edge and volume
    counts update incrementally in O(deg) per subset.
    """
    n = graph.n
    adj = graph.adjacency
    deg = graph.degrees
    loops = graph.loop_counts
    inside = [False] * n
    cur: set[int] = set()
    e_in = 0
    vol = 0
    for i in range(1, 1 << n):
        v = (i & -i).bit_length() - 1  # lowest toggled bit
        if inside[v]:
            inside[v] = False
            cur.discard(v)
            e_in -= loops[v] + sum(c for u, c in adj[v].items() if u != v and inside[u])
            vol -= deg[v]
        else:
            e_in += loops[v] + sum(c for u, c in adj[v].items() if u != v and inside[u])
            vol += deg[v]
            inside[v] = True
            cur.add(v)
        yield cur, e_in, vol


def max_relative_modularity(graph: Graph, cap: int = SUBSET_ENUMERATION_CAP) -> RelativeModularityResult:
    """Exact maximizer of relative modularity over all non-empty subsets.

    The returned value upper-bounds the modularity of the graph. Refuses
    (rather than truncating) when n exceeds the enumeration cap.
    """
    if graph.m == 0:
        raise ValueError("needs at least one edge")
    if graph.n > cap:
        raise EnumerationCapError(
            f"subset enumeration over n={graph.n} vertices exceeds cap {cap}"
        )
    two_m = 2.0 * graph.m
    best_val = -math.inf
    best_set: frozenset[int] = frozenset()
    for subset, e_in, vol in _iter_subsets(graph):
        if vol == 0:
            continue
        val = 2.0 * e_in / vol - vol / two_m
        if val > best_val + 1e-15:
            best_val = val
            best_set = frozenset(subset)
    return RelativeModularityResult(best_set, best_val)


def subset_bipartition_bound(graph: Graph, cap: int = SUBSET_ENUMERATION_CAP) -> float:
    """4 max_S (e(S)/m - vol(S)^2/vol(G)^2), an upper bound on modularity.

    Exact by subset enumeration; refuses when n exceeds the cap.
    """
    if graph.m == 0:
        raise ValueError("needs at least one edge")
    if graph.n > cap:
        raise EnumerationCapError(
            f"subset enumeration over n={graph.n} vertices exceeds cap {cap}"
        )
    m = graph.m
    vol_g = 2.0 * m
    best = 0.0  # S = empty set gives 0
    for _, e_in, vol in _iter_subsets(graph):
        val = e_in / m - (vol / vol_g) ** 2
        if val > best:
            best = val
    return 4.0 * best


def expected_random_partition_score(graph: Graph, k: int) -> float:
    """Expected score of a uniformly random k-labelling of the vertices.

    Exact closed form (1 - 1/k) * (loops/m - sum(d_v^2)/(2m)^2): a non-loop
    edge lands inside a part with probability 1/k while a loop always does.
    For loopless graphs this is -(1 - 1/k) * sum(d_v^2)/(2m)^2, strictly
    negative for any graph with an edge, which is why comparing a found
    partition against a random one invites false positives.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if graph.m == 0:
        raise ValueError("needs at least one edge")
    sq = sum(d * d for d in graph.degrees)
    loops = sum(graph.loop_counts)
    return (1.0 - 1.0 / k) * (loops / graph.m - sq / (4.0 * graph.m * graph.m))


def resolution_limit_components(graph: Graph) -> list[frozenset[int]]:
    """Connected components C with e(C) < sqrt(2m).

    No optimal partition splits such a component, so any community
    structure inside it is invisible to modularity maximization.
    """
    if graph.m == 0:
        raise ValueError("needs at least one edge")
    threshold = math.sqrt(2.0 * graph.m)
    flagged = []
    for comp in graph.components():
        if graph.internal_edges(comp) < threshold:
            flagged.append(comp)
    return flagged
