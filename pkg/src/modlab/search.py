"""Exact and heuristic modularity optimization.

Everything here is deterministic given its inputs and seed. Tie-breaking
is uniform across searches: the lowest part id wins, and enumerations
return the first optimum they encounter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, Partition
from .modularity import EnumerationCapError, ModularityBreakdown, modularity_score

__all__ = [
    "SearchResult",
    "exact_modularity",
    "swap_bipartition",
    "merge_to_k",
    "greedy_amalgamate",
    "percolation_transfer",
    "arc_partition",
    "local_moving",
    "best_bipartition_exhaustive",
]

PARTITION_ENUMERATION_CAP = 12


@dataclass(frozen=True)
class SearchResult:
    partition: Partition
    score: ModularityBreakdown
    method: str
    evaluations: int


def _result(graph: Graph, partition: Partition, method: str, evaluations: int) -> SearchResult:
    # score is always recomputed from the partition; no caching to go stale
    return SearchResult(partition, modularity_score(graph, partition), method, evaluations)


def exact_modularity(
    graph: Graph,
    cap: int = PARTITION_ENUMERATION_CAP,
    connected_parts_only: bool = False,
) -> SearchResult:
    """Global modularity maximum by enumeration of all vertex partitions.

    Enumerates restricted-growth strings (Bell-number many), keeping part
    volumes and internal edge counts incrementally. With
    `connected_parts_only` a partition is skipped when some part induces a
    disconnected subgraph on its degree-positive vertices; that filter is a
    heuristic shortcut, not a correctness assumption, and defaults to off.

    Refuses graphs larger than `cap` vertices rather than truncating.
    """
    n, m = graph.n, graph.m
    if m < 1:
        raise ValueError("exact search needs at least one edge")
    if n > cap:
        raise EnumerationCapError(
            f"partition enumeration over n={n} vertices exceeds cap {cap}"
        )
    deg = graph.degrees
    loops = graph.loop_counts
    earlier: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (u, v), count in _pair_multiplicities(graph).items():
        earlier[v].append((u, count))
    adj = graph.adjacency

    inv_m = 1.0 / m
    inv_4m2 = 1.0 / (4.0 * m * m)
    assign = [0] * n
    vols = [0] * n
    best_q = -math.inf
    best_assign: tuple[int, ...] | None = None
    evaluations = 0

    def parts_connected() -> bool:
        for part_id in range(max(assign[:n]) + 1):
            members = [v for v in range(n) if assign[v] == part_id and deg[v] > 0]
            if len(members) <= 1:
                continue
            inside = set(members)
            seen = {members[0]}
            stack = [members[0]]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y in inside and y not in seen:
                        seen.add(y)
                        stack.append(y)
            if len(seen) != len(members):
                return False
        return True

    def recurse(v: int, used: int, internal: int):
        nonlocal best_q, best_assign, evaluations
        if v == n:
            if connected_parts_only and not parts_connected():
                return
            evaluations += 1
            tax = 0.0
            for j in range(used):
                tax += vols[j] * vols[j]
            q = internal * inv_m - tax * inv_4m2
            if q > best_q + 1e-15:
                best_q = q
                best_assign = tuple(assign)
            return
        dv = deg[v]
        lv = loops[v]
        neighbours = earlier[v]
        for pid in range(used + 1):
            gained = lv
            for u, count in neighbours:
                if assign[u] == pid:
                    gained += count
            assign[v] = pid
            vols[pid] += dv
            recurse(v + 1, used + (1 if pid == used else 0), internal + gained)
            vols[pid] -= dv

    recurse(0, 0, 0)
    assert best_assign is not None
    return _result(graph, Partition(best_assign), "exact", evaluations)


def _pair_multiplicities(graph: Graph) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = {}
    for u, v in graph.edges:
        if u != v:
            counts[(u, v)] = counts.get((u, v), 0) + 1
    return counts


def best_bipartition_exhaustive(graph: Graph, cap: int = 22) -> SearchResult:
    """Best score over all 2-part partitions, by scanning all 2^(n-1) splits."""
    n, m = graph.n, graph.m
    if m < 1:
        raise ValueError("needs at least one edge")
    if n > cap:
        raise EnumerationCapError(f"bipartition scan over n={n} exceeds cap {cap}")
    deg = graph.degrees
    pairs = list(_pair_multiplicities(graph).items())
    vol_g = 2 * m
    best_q = 0.0  # the single-part partition scores exactly 0
    best_mask = 0
    for mask in range(1, 1 << (n - 1)):  # vertex n-1 stays on side 0: halves the scan
        vol = 0
        for v in range(n - 1):
            if mask >> v & 1:
                vol += deg[v]
        cross = 0
        for (u, v), count in pairs:
            su = mask >> u & 1 if u < n - 1 else 0
            sv = mask >> v & 1 if v < n - 1 else 0
            if su != sv:
                cross += count
        internal = m - cross
        q = internal / m - (vol * vol + (vol_g - vol) ** 2) / (4.0 * m * m)
        if q > best_q + 1e-15:
            best_q = q
            best_mask = mask
    if best_mask == 0:
        partition = Partition.single_part(n)
    else:
        labels = [(best_mask >> v) & 1 if v < n - 1 else 0 for v in range(n)]
        partition = Partition(tuple(labels))
    return _result(graph, partition, "bipartition-scan", (1 << (n - 1)) - 1)


def swap_bipartition(graph: Graph) -> SearchResult:
    """Balanced bipartition improved by pairwise swaps against a held-out block.

    Starts from the even/odd-index bipartition. With k = floor(n/6), the
    last k vertices of each side are held fixed; each remaining pair
    (a_i, b_i) is swapped when that strictly increases the number of its
    edges into the held-out block that land within parts. When n is not
    divisible by 6 the trailing n mod 6 vertices stay on their initial
    side and are excluded from the held-out block. Deterministic given the
    graph and its vertex order.
    """
    n, m = graph.n, graph.m
    if m < 1:
        raise ValueError("swap needs at least one edge")
    side = [v % 2 for v in range(n)]  # 0 = even side, 1 = odd side
    bulk = n - (n % 6)
    k = bulk // 6
    evaluations = 0
    if k > 0:
        evens = [v for v in range(bulk) if v % 2 == 0]
        odds = [v for v in range(bulk) if v % 2 == 1]
        held_a = set(evens[2 * k:])
        held_b = set(odds[2 * k:])
        adj = graph.adjacency

        def edges_into(x: int, block: set[int]) -> int:
            return sum(count for u, count in adj[x].items() if u in block and u != x)

        for i in range(2 * k):
            a, b = evens[i], odds[i]
            current = edges_into(a, held_a) + edges_into(b, held_b)
            swapped = edges_into(a, held_b) + edges_into(b, held_a)
            evaluations += 1
            if swapped > current:
                side[a], side[b] = 1, 0
    parts = [[v for v in range(n) if side[v] == 0], [v for v in range(n) if side[v] == 1]]
    parts = [p for p in parts if p]
    return _result(graph, Partition.from_parts(parts, n), "swap", evaluations)


def merge_to_k(
    graph: Graph,
    partition: Partition,
    k: int,
    seed: int = 0,
    repeats: int = 64,
) -> SearchResult:
    """Randomly merge parts down to at most k, keeping the best of `repeats` draws.

    Each draw gives every part an independent uniform label in 1..k and
    unions parts sharing a label. A partition with at most k parts is
    returned unchanged. In expectation a single draw scores (1 - 1/k)
    times the input partition's score.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if partition.k <= k:
        return _result(graph, partition, "merge-k", 0)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    best: SearchResult | None = None
    for _ in range(max(1, repeats)):
        labels = rng.integers(0, k, size=partition.k)
        merged = partition.merge_by_labels([int(x) for x in labels])
        candidate = _result(graph, merged, "merge-k", max(1, repeats))
        if best is None or candidate.score.q > best.score.q + 1e-15:
            best = candidate
    assert best is not None
    return best


def greedy_amalgamate(graph: Graph, eta: float, partition: Partition) -> SearchResult:
    """Amalgamate parts until every part has volume >= eta * vol(G).

    Repeatedly merges the lowest-volume underweight part into the partner
    whose merge loses the least modularity (ties to the smaller part id).
    If the loop is about to collapse everything into one part, a
    number-bipartitioning fallback first-fits the original parts by
    descending volume into the lighter side and keeps that bipartition when
    it meets the volume floor and scores better than the single part.

    The output's parts are unions of the input's parts, there are no more
    of them, and the score drops by less than 2 * eta.
    """
    if not (0.0 < eta <= 1.0):
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    m = graph.m
    if m < 1:
        raise ValueError("needs at least one edge")
    if partition.n != graph.n:
        raise ValueError("partition/vertex-count mismatch")
    vol_g = 2 * m
    threshold = eta * vol_g

    t = partition.k
    vol = {i: graph.volume(part) for i, part in enumerate(partition.parts)}
    cross: dict[int, dict[int, int]] = {i: {} for i in range(t)}
    assign = partition.assignment
    for u, v in graph.edges:
        a, b = assign[u], assign[v]
        if a != b:
            cross[a][b] = cross[a].get(b, 0) + 1
            cross[b][a] = cross[b].get(a, 0) + 1
    members: dict[int, set[int]] = {i: {i} for i in range(t)}
    active = set(range(t))
    merges = 0

    def finish(groups: list[set[int]]) -> SearchResult:
        parts = []
        for group in groups:
            block: set[int] = set()
            for original in group:
                block |= partition.parts[original]
            parts.append(block)
        out = Partition.from_parts(parts, graph.n)
        return _result(graph, out, "fatten", merges)

    while True:
        underweight = [i for i in active if vol[i] < threshold]
        if not underweight or len(active) == 1:
            break
        low = min(underweight, key=lambda i: (vol[i], i))
        if len(active) == 2:
            fallback = _first_fit_bipartition(graph, partition, threshold)
            single = _result(graph, Partition.single_part(graph.n), "fatten", merges)
            if fallback is not None and fallback.score.q > single.score.q:
                return fallback
            return single
        # integer-exact loss comparison: 2 m^2 * loss = vol_P*vol_Q - 2m*e(P,Q)
        best_partner = None
        best_loss = None
        for other in sorted(active - {low}):
            loss = vol[low] * vol[other] - vol_g * cross[low].get(other, 0)
            if best_loss is None or loss < best_loss:
                best_loss = loss
                best_partner = other
        keep, drop = (low, best_partner) if low < best_partner else (best_partner, low)
        vol[keep] += vol.pop(drop)
        members[keep] |= members.pop(drop)
        dropped_cross = cross.pop(drop)
        for other, count in dropped_cross.items():
            cross[other].pop(drop, None)
            if other == keep:
                continue
            cross[keep][other] = cross[keep].get(other, 0) + count
            cross[other][keep] = cross[keep][other]
        active.remove(drop)
        merges += 1

    if partition.k == len(active) and not merges:
        return SearchResult(partition, modularity_score(graph, partition), "fatten", 0)
    return finish([members[i] for i in sorted(active)])


def _first_fit_bipartition(graph: Graph, partition: Partition, threshold: float):
    """Descending-volume first fit of the original parts into the lighter side."""
    order = sorted(
        range(partition.k),
        key=lambda i: (-graph.volume(partition.parts[i]), i),
    )
    sides: list[set[int]] = [set(), set()]
    loads = [0, 0]
    for i in order:
        target = 0 if loads[0] <= loads[1] else 1
        sides[target] |= set(partition.parts[i])
        loads[target] += graph.volume(partition.parts[i])
    if min(loads) < threshold or not sides[0] or not sides[1]:
        return None
    out = Partition.from_parts(sides, graph.n)
    return SearchResult(out, modularity_score(graph, out), "fatten", partition.k)


def percolation_transfer(observed: Graph, partition: Partition, eta: float = 0.05) -> Partition:
    """Amalgamate a partition found on an observed (percolated) graph.

    The result is computed from the observed graph only; it is intended to
    be scored against the underlying graph, whose identity of course never
    enters the computation.
    """
    return greedy_amalgamate(observed, eta, partition).partition


def _cycles_of_two_regular(graph: Graph) -> list[list[int]]:
    incidence: list[list[tuple[int, int]]] = [[] for _ in range(graph.n)]
    for ei, (u, v) in enumerate(graph.edges):
        incidence[u].append((ei, v))
        if u != v:
            incidence[v].append((ei, u))
    used = [False] * graph.m
    cycles = []
    for start in range(graph.n):
        for ei, nxt in incidence[start]:
            if used[ei]:
                continue
            used[ei] = True
            cycle = [start]
            current = nxt
            while current != start:
                cycle.append(current)
                step = None
                for ej, w in incidence[current]:
                    if not used[ej]:
                        step = (ej, w)
                        break
                assert step is not None, "not 2-regular"
                used[step[0]] = True
                current = step[1]
            cycles.append(cycle)
    return cycles


def arc_partition(graph: Graph, k: int, cycle: list[int] | None = None) -> SearchResult:
    """Contiguous-arc partition of a cycle structure.

    For a 2-regular graph (disjoint union of cycles) each cycle is cut
    into a proportional share of the k arcs, sizes within a cycle
    differing by at most one. Alternatively a Hamiltonian cycle of an
    arbitrary graph may be supplied as a vertex sequence and is cut the
    same way. For the n-cycle with k dividing n the score is exactly
    1 - k/n - 1/k.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if graph.m < 1:
        raise ValueError("needs at least one edge")
    if cycle is not None:
        if sorted(cycle) != list(range(graph.n)):
            raise ValueError("supplied cycle must visit every vertex exactly once")
        adj = graph.adjacency
        for i, u in enumerate(cycle):
            v = cycle[(i + 1) % len(cycle)]
            if len(cycle) > 1 and v not in adj[u]:
                raise ValueError(f"supplied cycle uses a non-edge ({u}, {v})")
        cycles = [list(cycle)]
    else:
        if any(d != 2 for d in graph.degrees):
            raise ValueError(
                "graph is not 2-regular and no Hamiltonian cycle was supplied"
            )
        cycles = _cycles_of_two_regular(graph)
    n = graph.n
    labels = [0] * n
    next_id = 0
    for cyc in cycles:
        length = len(cyc)
        share = max(1, round(k * length / n))
        share = min(share, length)
        base, extra = divmod(length, share)
        pos = 0
        for arc in range(share):
            size = base + (1 if arc < extra else 0)
            for v in cyc[pos:pos + size]:
                labels[v] = next_id
            pos += size
            next_id += 1
    return _result(graph, Partition(tuple(labels)), "arc", len(cycles))


def local_moving(
    graph: Graph,
    seed: int = 0,
    max_sweeps: int = 100,
    init: Partition | None = None,
) -> SearchResult:
    """Greedy single-vertex relocation until no strictly improving move.

    Vertices are visited in a seeded random order each sweep; each vertex
    moves to the neighbouring part (or to a fresh empty part) with the
    best strictly positive gain, ties to the lowest part id. The score
    never decreases. This is deliberately plain local moving, not a
    faithful multi-level community algorithm.
    """
    n, m = graph.n, graph.m
    if m < 1:
        raise ValueError("needs at least one edge")
    if init is None:
        init = Partition.singletons(n)
    if init.n != n:
        raise ValueError("initial partition/vertex-count mismatch")
    deg = graph.degrees
    adj = graph.adjacency
    part = list(init.assignment)
    volumes = [0] * (max(part) + 1)
    population = [0] * (max(part) + 1)
    for v in range(n):
        volumes[part[v]] += deg[v]
        population[part[v]] += 1
    free_ids: list[int] = []
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    two_m2 = 2.0 * m * m
    evaluations = 0

    for _ in range(max_sweeps):
        moved = 0
        for v in rng.permutation(n):
            v = int(v)
            home = part[v]
            dv = deg[v]
            if dv == 0:
                continue
            weight_to: dict[int, int] = {}
            for u, count in adj[v].items():
                if u != v:
                    weight_to[part[u]] = weight_to.get(part[u], 0) + count
            links_home = weight_to.get(home, 0)
            vol_home = volumes[home]
            best_gain = 0.0
            best_part = home
            for target in sorted(weight_to):
                if target == home:
                    continue
                evaluations += 1
                gain = (weight_to[target] - links_home) / m - dv * (
                    volumes[target] + dv - vol_home
                ) / two_m2
                if gain > best_gain + 1e-15:
                    best_gain = gain
                    best_part = target
            # moving out into a fresh part
            evaluations += 1
            gain_isolate = (0 - links_home) / m - dv * (dv - vol_home) / two_m2
            if gain_isolate > best_gain + 1e-15:
                best_gain = gain_isolate
                if free_ids:
                    best_part = free_ids.pop()
                else:
                    volumes.append(0)
                    population.append(0)
                    best_part = len(volumes) - 1
            if best_part != home:
                volumes[home] -= dv
                volumes[best_part] += dv
                population[home] -= 1
                population[best_part] += 1
                part[v] = best_part
                if population[home] == 0:
                    free_ids.append(home)
                moved += 1
        if moved == 0:
            break
    return _result(graph, Partition(tuple(part)), "local-moving", evaluations)
