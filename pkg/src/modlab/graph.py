"""Core graph, partition, and weight-function types.

Vertices are dense integers 0..n-1. Graphs are undirected multigraphs:
parallel edges are kept and loops are permitted. A loop at v counts 2
toward degree(v) and 1 toward edge counts, so the handshake identity
sum(degree) = 2m holds for every graph. All types are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "Partition",
    "WeightFunction",
    "EdgeListFormatError",
    "build_graph",
    "volume",
    "internal_edges",
    "load_edge_list",
    "save_edge_list",
    "load_partition",
    "save_partition",
]


class EdgeListFormatError(ValueError):
    """Parse failure in an edge-list or partition file, with line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Graph:
    """Undirected multigraph with loops, on vertices 0..n-1.

    Edges are normalized to (min, max) pairs and stored sorted, so two
    graphs with the same edge multiset compare equal regardless of input
    order. Each loop contributes one entry to `edges` and counts once in
    `m`.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex count must be >= 1, got {self.n}")
        norm = []
        for i, e in enumerate(self.edges):
            try:
                u, v = e
            except (TypeError, ValueError):
                raise ValueError(f"edge {i}: expected a pair, got {e!r}") from None
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(
                    f"edge {i}: endpoint out of range for n={self.n}: ({u}, {v})"
                )
            norm.append((u, v) if u <= v else (v, u))
        norm.sort()
        object.__setattr__(self, "edges", tuple(norm))
        deg = [0] * self.n
        for u, v in self.edges:
            if u == v:
                deg[u] += 2
            else:
                deg[u] += 1
                deg[v] += 1
        object.__setattr__(self, "_degrees", tuple(deg))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> tuple[int, ...]:
        return self._degrees

    def degree(self, v: int) -> int:
        return self._degrees[v]

    @cached_property
    def adjacency(self) -> tuple[dict, ...]:
        """Per-vertex {neighbour: multiplicity}; loops appear at adj[v][v]."""
        adj: tuple[dict, ...] = tuple({} for _ in range(self.n))
        for u, v in self.edges:
            adj[u][v] = adj[u].get(v, 0) + 1
            if u != v:
                adj[v][u] = adj[v].get(u, 0) + 1
        return adj

    @cached_property
    def loop_counts(self) -> tuple[int, ...]:
        loops = [0] * self.n
        for u, v in self.edges:
            if u == v:
                loops[u] += 1
        return tuple(loops)

    def volume(self, vertices: Iterable[int]) -> int:
        """Sum of degrees over a vertex set."""
        deg = self._degrees
        return sum(deg[v] for v in set(vertices))

    def internal_edges(self, vertices: Iterable[int]) -> int:
        """Number of edges with both endpoints in the set (loops count once)."""
        inside = set(vertices)
        for v in inside:
            if not (0 <= v < self.n):
                raise ValueError(f"vertex {v} not in 0..{self.n - 1}")
        return sum(1 for u, v in self.edges if u in inside and v in inside)

    def is_simple(self) -> bool:
        """True when the graph has no loops and no parallel edges."""
        seen = set()
        for u, v in self.edges:
            if u == v or (u, v) in seen:
                return False
            seen.add((u, v))
        return True

    def simplify(self) -> "Graph":
        """Copy with loops removed and parallel edges merged."""
        kept = sorted({(u, v) for u, v in self.edges if u != v})
        return Graph(self.n, tuple(kept))

    def components(self) -> list[frozenset[int]]:
        """Connected components as vertex sets (isolated vertices included)."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            stack = [s]
            seen[s] = True
            comp = [s]
            while stack:
                x = stack.pop()
                for y in self.adjacency[x]:
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        stack.append(y)
            comps.append(frozenset(comp))
        return comps

    def induced_subgraph(self, vertices: Sequence[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph relabelled 0..k-1.

        Returns (subgraph, mapping) where mapping[i] is the original id of
        new vertex i. The mapping preserves the order given.
        """
        verts = list(vertices)
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertices in induced subgraph request")
        index = {v: i for i, v in enumerate(verts)}
        edges = [
            (index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        ]
        return Graph(len(verts), tuple(edges)), tuple(verts)


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a multigraph from a vertex count and an edge multiset.

    Raises ValueError naming the offending edge index when an endpoint is
    out of range.
    """
    return Graph(n, tuple(edges))


def volume(graph: Graph, vertices: Iterable[int]) -> int:
    return graph.volume(vertices)


def internal_edges(graph: Graph, vertices: Iterable[int]) -> int:
    return graph.internal_edges(vertices)


@dataclass(frozen=True)
class Partition:
    """Assignment of every vertex to exactly one non-empty part.

    Part ids are contiguous from 0, relabelled by first appearance, so two
    partitions with the same blocks compare equal.
    """

    assignment: tuple[int, ...]

    def __post_init__(self):
        if not self.assignment:
            raise ValueError("partition of an empty vertex set")
        relabel: dict[int, int] = {}
        canon = []
        for a in self.assignment:
            if a not in relabel:
                relabel[a] = len(relabel)
            canon.append(relabel[a])
        object.__setattr__(self, "assignment", tuple(canon))

    @classmethod
    def from_assignment(cls, labels: Sequence[int]) -> "Partition":
        return cls(tuple(int(x) for x in labels))

    @classmethod
    def from_parts(cls, parts: Iterable[Iterable[int]], n: int | None = None) -> "Partition":
        parts = [set(p) for p in parts]
        if any(not p for p in parts):
            raise ValueError("empty part in partition")
        cover: dict[int, int] = {}
        for i, p in enumerate(parts):
            for v in p:
                if v in cover:
                    raise ValueError(f"vertex {v} assigned to more than one part")
                cover[v] = i
        if n is None:
            n = max(cover) + 1 if cover else 0
        if set(cover) != set(range(n)):
            missing = sorted(set(range(n)) - set(cover))
            raise ValueError(f"partition does not cover vertices {missing[:5]}")
        return cls(tuple(cover[v] for v in range(n)))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @classmethod
    def single_part(cls, n: int) -> "Partition":
        return cls((0,) * n)

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def k(self) -> int:
        return max(self.assignment) + 1

    @cached_property
    def parts(self) -> tuple[frozenset[int], ...]:
        groups: list[list[int]] = [[] for _ in range(self.k)]
        for v, a in enumerate(self.assignment):
            groups[a].append(v)
        return tuple(frozenset(g) for g in groups)

    def part_of(self, v: int) -> int:
        return self.assignment[v]

    def merge_by_labels(self, labels: Sequence[int]) -> "Partition":
        """New partition whose parts are unions of this one's, grouped by label."""
        if len(labels) != self.k:
            raise ValueError("one label per part required")
        return Partition(tuple(labels[a] for a in self.assignment))

    def restricted_to(self, vertices: Sequence[int]) -> "Partition":
        """Partition induced on a vertex subsequence (relabelled 0..k-1)."""
        return Partition(tuple(self.assignment[v] for v in vertices))


@dataclass(frozen=True)
class WeightFunction:
    """Symmetric nonnegative weights on vertex pairs, diagonal permitted."""

    matrix: np.ndarray

    def __post_init__(self):
        w = np.array(self.matrix, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        if not np.array_equal(w, w.T):
            raise ValueError("weight matrix must be symmetric")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "matrix", w)

    @classmethod
    def from_graph(cls, graph: Graph) -> "WeightFunction":
        """0/1 multiplicity weights; a loop at v becomes w[v, v] = 2.

        With this convention the weighted degree and edge counts agree
        exactly with the unweighted ones, loops included.
        """
        w = np.zeros((graph.n, graph.n))
        for u, v in graph.edges:
            if u == v:
                w[u, u] += 2.0
            else:
                w[u, v] += 1.0
                w[v, u] += 1.0
        return cls(w)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def total_weight(self) -> float:
        """Weighted edge count over the whole vertex set."""
        return float(self.matrix.sum()) / 2.0

    def volume(self, vertices: Iterable[int]) -> float:
        idx = sorted(set(vertices))
        return float(self.degrees[idx].sum())

    def edge_weight(self, vertices: Iterable[int]) -> float:
        """Weighted internal edge count: half the sum over ordered pairs."""
        idx = sorted(set(vertices))
        sub = self.matrix[np.ix_(idx, idx)]
        return float(sub.sum()) / 2.0

    def is_probability(self) -> bool:
        return bool(np.all(self.matrix <= 1.0))

    def scaled(self, factor: float) -> "WeightFunction":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return WeightFunction(self.matrix * factor)


# -- edge-list and partition file I/O ---------------------------------------
#
# Edge-list format: first non-comment line is the vertex count, every
# following line "u v"; '#' starts a comment, blank lines are ignored.
# Partition format: one "vertex part_id" pair per line. Both UTF-8 with LF.


def save_edge_list(graph: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{graph.n}\n")
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def load_edge_list(path) -> Graph:
    n = None
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split()
            if n is None:
                if len(fields) != 1:
                    raise EdgeListFormatError(
                        f"expected a vertex count, got {text!r}", lineno
                    )
                try:
                    n = int(fields[0])
                except ValueError:
                    raise EdgeListFormatError(
                        f"vertex count is not an integer: {fields[0]!r}", lineno
                    ) from None
                continue
            if len(fields) != 2:
                raise EdgeListFormatError(f"expected 'u v', got {text!r}", lineno)
            try:
                u, v = int(fields[0]), int(fields[1])
            except ValueError:
                raise EdgeListFormatError(
                    f"non-integer endpoint in {text!r}", lineno
                ) from None
            if n is not None and not (0 <= u < n and 0 <= v < n):
                raise EdgeListFormatError(
                    f"endpoint out of range for n={n}: ({u}, {v})", lineno
                )
            edges.append((u, v))
    if n is None:
        raise EdgeListFormatError("missing vertex-count header")
    return Graph(n, tuple(edges))


def save_partition(partition: Partition, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v, a in enumerate(partition.assignment):
            fh.write(f"{v} {a}\n")


def load_partition(path, n: int | None = None) -> Partition:
    seen: dict[int, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split()
            if len(fields) != 2:
                raise EdgeListFormatError(
                    f"expected 'vertex part_id', got {text!r}", lineno
                )
            try:
                v, a = int(fields[0]), int(fields[1])
            except ValueError:
                raise EdgeListFormatError(f"non-integer field in {text!r}", lineno) from None
            if v in seen:
                raise EdgeListFormatError(f"vertex {v} assigned twice", lineno)
            seen[v] = a
    if not seen:
        raise EdgeListFormatError("empty partition file")
    count = n if n is not None else max(seen) + 1
    missing = sorted(set(range(count)) - set(seen))
    if missing:
        raise EdgeListFormatError(f"vertices {missing[:5]} missing from partition")
    extra = sorted(set(seen) - set(range(count)))
    if extra:
        raise EdgeListFormatError(f"vertices {extra[:5]} out of range for n={count}")
    return Partition(tuple(seen[v] for v in range(count)))
