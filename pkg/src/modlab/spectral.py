"""Normalized Laplacian, spectral gap, and spectral modularity bounds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .modularity import EnumerationCapError

__all__ = [
    "Spectrum",
    "normalized_laplacian",
    "spectral_gap",
    "spectral_upper_bound",
    "DENSE_EIGENSOLVER_CAP",
]

DENSE_EIGENSOLVER_CAP = 2000


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of the normalized Laplacian, ascending, with the gap.

    The gap is max over nontrivial eigenvalues of |1 - lambda|; all
    eigenvalues lie in [0, 2] and the smallest is 0 for any graph without
    isolated vertices.
    """

    eigenvalues: np.ndarray
    gap: float


def normalized_laplacian(graph: Graph) -> np.ndarray:
    """I - D^(-1/2) A D^(-1/2) with adjacency multiplicities.

    Parallel edges add to the adjacency entry and a loop at v contributes
    2 to A[v, v], consistent with the degree convention. Graphs with an
    isolated vertex are refused, naming the vertex.
    """
    deg = graph.degrees
    for v, d in enumerate(deg):
        if d == 0:
            raise ValueError(f"vertex {v} is isolated; drop it before taking spectra")
    n = graph.n
    a = np.zeros((n, n))
    for u, v in graph.edges:
        if u == v:
            a[u, u] += 2.0
        else:
            a[u, v] += 1.0
            a[v, u] += 1.0
    inv_sqrt = 1.0 / np.sqrt(np.asarray(deg, dtype=float))
    lap = -inv_sqrt[:, None] * a * inv_sqrt[None, :]
    np.fill_diagonal(lap, 1.0 + np.diagonal(lap))
    return lap


def spectral_gap(graph: Graph, cap: int = DENSE_EIGENSOLVER_CAP) -> Spectrum:
    """Full spectrum by dense symmetric eigendecomposition, plus the gap.

    Refuses graphs above `cap` vertices; raise the cap explicitly for
    larger experiments instead of silently switching solvers.
    """
    if graph.n > cap:
        raise EnumerationCapError(
            f"dense eigendecomposition at n={graph.n} exceeds cap {cap}"
        )
    lap = normalized_laplacian(graph)
    eigenvalues = np.linalg.eigvalsh(lap)
    if graph.n == 1:
        gap = 0.0
    else:
        gap = float(np.max(np.abs(1.0 - eigenvalues[1:])))
    return Spectrum(eigenvalues, gap)


def spectral_upper_bound(graph: Graph, subgraph: Graph, cap: int = DENSE_EIGENSOLVER_CAP) -> float:
    """Upper bound on modularity from a subgraph's spectral gap.

    With alpha = e(H)/e(G) the bound is 1 - alpha * min(alpha, 1 - gap(H));
    taking H = G reduces it to the spectral gap itself. H must be an
    edge-submultiset of G without isolated vertices.
    """
    if graph.m < 1:
        raise ValueError("needs at least one edge")
    _check_subgraph(graph, subgraph)
    gap = spectral_gap(subgraph, cap=cap).gap
    alpha = subgraph.m / graph.m
    return 1.0 - alpha * min(alpha, 1.0 - gap)


def _check_subgraph(graph: Graph, subgraph: Graph) -> None:
    if subgraph.n > graph.n:
        raise ValueError("subgraph has more vertices than the graph")
    available: dict[tuple[int, int], int] = {}
    for e in graph.edges:
        available[e] = available.get(e, 0) + 1
    for e in subgraph.edges:
        if available.get(e, 0) == 0:
            raise ValueError(f"edge {e} of the claimed subgraph is not in the graph")
        available[e] -= 1
