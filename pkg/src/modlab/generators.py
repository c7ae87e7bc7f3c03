"""Seeded random-graph generators and closed-form block-model quantities.

Every generator is a pure function of its parameters and a 64-bit seed.
Seeds feed numpy SeedSequence/PCG64 streams; replicate streams are derived
with spawn keys (see `rng_from`), so results are reproducible regardless
of how many replicates run concurrently. Where a generator consumes the
stream in phases (labels, then pair coins, then loop coins), that order is
part of the contract and will not change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, Partition

__all__ = [
    "rng_from",
    "SbmInstance",
    "PaTrace",
    "HyperbolicInstance",
    "SpaInstance",
    "PlantedOptimalityReport",
    "gnp",
    "gnm",
    "config_model",
    "preferential_attachment",
    "attachment_measure",
    "spa",
    "hyperbolic",
    "sector_partition",
    "sbm_balanced",
    "sbm_general",
    "planted_score_formula",
    "balanced_partition_coefficient",
    "planted_optimality_conditions",
    "wheels_graph",
    "cycle_graph",
]


def rng_from(seed: int, *spawn_key: int) -> np.random.Generator:
    """Deterministic generator for (seed, spawn_key); split-safe across tasks."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(x) for x in spawn_key))
    return np.random.default_rng(ss)


# -- pair-index helpers -------------------------------------------------------

def _pair_starts(n: int) -> np.ndarray:
    counts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return np.concatenate(([0], np.cumsum(counts)[:-1]))


def _unrank_pairs(positions: np.ndarray, n: int) -> list[tuple[int, int]]:
    """Map linear indices over the ordered pair list (0,1),(0,2),... to pairs."""
    starts = _pair_starts(n)
    u = np.searchsorted(starts, positions, side="right") - 1
    v = positions - starts[u] + u + 1
    return [(int(a), int(b)) for a, b in zip(u, v)]


def _bernoulli_positions(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of an iid Bernoulli(p) subset of range(total), via geometric gaps."""
    if total == 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    chunks = []
    pos = -1
    batch = max(256, int(total * p * 1.1) + 16)
    while True:
        gaps = rng.geometric(p, size=batch)
        cand = pos + np.cumsum(gaps)
        take = cand[cand < total]
        chunks.append(take)
        if len(take) < len(cand):
            break
        pos = int(cand[-1])
    return np.concatenate(chunks).astype(np.int64)


def gnp(n: int, p: float, seed: int) -> Graph:
    """Binomial random graph: each of the n(n-1)/2 pairs appears independently."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must be in [0, 1], got {p}")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng_from(seed)
    total = n * (n - 1) // 2
    if p <= 0.5:
        positions = _bernoulli_positions(total, p, rng)
    else:
        # dense: sample the complement instead
        absent = _bernoulli_positions(total, 1.0 - p, rng)
        positions = np.setdiff1d(np.arange(total, dtype=np.int64), absent)
    return Graph(n, tuple(_unrank_pairs(positions, n)))


def gnm(n: int, m: int, seed: int) -> Graph:
    """Uniform random graph with exactly m edges (no loops, no parallels)."""
    total = n * (n - 1) // 2
    if not (0 <= m <= total):
        raise ValueError(f"m must be in [0, {total}] for n={n}, got {m}")
    rng = rng_from(seed)
    positions = rng.choice(total, size=m, replace=False)
    return Graph(n, tuple(_unrank_pairs(np.sort(positions), n)))


def config_model(n: int, r: int, seed: int, mode: str = "multigraph") -> Graph:
    """Random r-regular multigraph from a uniform matching of degree stubs.

    mode 'multigraph' keeps loops and parallel edges; 'erased' removes
    loops and merges parallels (degrees then only approximately r);
    'rejection' resamples until the pairing is simple, up to 1000 tries.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if (n * r) % 2 != 0:
        raise ValueError(f"n*r must be even, got n={n}, r={r}")
    if mode not in ("multigraph", "erased", "rejection"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "rejection" and r < 1:
        raise ValueError("rejection sampling needs r >= 1")
    rng = rng_from(seed)
    for attempt in range(1000):
        stubs = np.repeat(np.arange(n), r)
        rng.shuffle(stubs)
        edges = tuple(
            (int(stubs[2 * i]), int(stubs[2 * i + 1])) for i in range(n * r // 2)
        )
        graph = Graph(n, edges)
        if mode == "multigraph":
            return graph
        if mode == "erased":
            return graph.simplify()
        if graph.is_simple():
            return graph
    raise RuntimeError("rejection sampling failed to produce a simple graph in 1000 tries")


@dataclass(frozen=True)
class PaTrace:
    """A preferential-attachment run: the mini-vertex tree-with-loops process
    and the multigraph obtained by merging runs of h consecutive mini-vertices."""

    mini_graph: Graph
    merged_graph: Graph
    h: int


def preferential_attachment(n: int, h: int, seed: int) -> PaTrace:
    """Preferential attachment multigraph with n vertices and exactly h*n edges.

    The process runs on h*n mini-vertices: the first carries a loop; each
    later mini-vertex t attaches to an earlier mini-vertex with probability
    proportional to its current degree, or loops with probability
    1/(2t+1). Mini-vertices are then merged h at a time, keeping loops and
    parallel edges.
    """
    if n < 1 or h < 1:
        raise ValueError("n and h must be >= 1")
    rng = rng_from(seed)
    steps = h * n
    endpoints = [0, 0]  # each edge contributes both endpoints; start: loop at mini 0
    mini_edges = [(0, 0)]
    for new in range(1, steps):
        t = new  # edges so far
        j = int(rng.integers(0, 2 * t + 1))
        target = endpoints[j] if j < 2 * t else new
        mini_edges.append((new, target))
        endpoints.append(new)
        endpoints.append(target)
    mini_graph = Graph(steps, tuple(mini_edges))
    merged_edges = tuple((u // h, v // h) for u, v in mini_edges)
    merged_graph = Graph(n, merged_edges)
    return PaTrace(mini_graph, merged_graph, h)


def attachment_measure(indices) -> float:
    """Measure of a set of 1-based attachment-step indices.

    Each index j contributes the double-factorial ratio (2j-3)!!/(2j-2)!!,
    scaled by sqrt(pi)/2. Computed through the ratio recurrence
    r_1 = 1, r_{j+1} = r_j * (2j-1)/(2j), which never forms a factorial.
    """
    wanted = sorted(set(int(j) for j in indices))
    if not wanted:
        return 0.0
    if wanted[0] < 1:
        raise ValueError("indices must be >= 1")
    total = 0.0
    ratio = 1.0
    pick = set(wanted)
    for j in range(1, wanted[-1] + 1):
        if j in pick:
            total += ratio
        ratio *= (2 * j - 1) / (2 * j)
    return 0.5 * math.sqrt(math.pi) * total


@dataclass(frozen=True)
class SpaInstance:
    """Spatial preferential attachment run on the unit torus."""

    positions: np.ndarray
    directed_edges: tuple[tuple[int, int], ...]
    graph: Graph
    m_dim: int
    a1: float
    a2: float
    p: float


_BALL_VOLUME_CONSTANT = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


def _ball_radius(volume: float, m_dim: int) -> float:
    return (volume / _BALL_VOLUME_CONSTANT[m_dim]) ** (1.0 / m_dim)


def spa(n: int, m_dim: int, a1: float, a2: float, p: float, seed: int) -> SpaInstance:
    """Spatial preferential attachment: influence spheres grow with in-degree.

    Vertices arrive uniformly on the torus [0,1)^m. An existing vertex v
    links to the newcomer (newcomer -> v, kept with probability p) when the
    newcomer lands within v's sphere of influence, whose volume is
    min((a1 * indegree(v) + a2) / t, 1) at time t. Spheres are closed:
    boundary points count as inside. Stream order per step: position, then
    acceptance coins for in-range vertices in ascending id order.
    """
    if m_dim not in _BALL_VOLUME_CONSTANT:
        raise ValueError("m_dim must be 1, 2, or 3")
    if a1 <= 0 or a2 <= 0:
        raise ValueError("a1 and a2 must be positive")
    if not (0.0 < p <= 1.0):
        raise ValueError("p must be in (0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng_from(seed)
    positions = np.empty((n, m_dim))
    indegree = np.zeros(n, dtype=np.int64)
    arcs: list[tuple[int, int]] = []
    for t in range(1, n + 1):
        newcomer = t - 1
        positions[newcomer] = rng.random(m_dim)
        if t == 1:
            continue
        older = positions[:newcomer]
        delta = np.abs(older - positions[newcomer])
        delta = np.minimum(delta, 1.0 - delta)
        dist = np.sqrt((delta * delta).sum(axis=1))
        volumes = np.minimum((a1 * indegree[:newcomer] + a2) / (t - 1), 1.0)
        in_range = np.zeros(newcomer, dtype=bool)
        full = volumes >= 1.0
        in_range[full] = True
        partial = ~full
        if np.any(partial):
            radii = _ball_radius(volumes[partial], m_dim)
            in_range[partial] = dist[partial] <= radii
        candidates = np.flatnonzero(in_range)
        if len(candidates):
            coins = rng.random(len(candidates))
            for v, coin in zip(candidates, coins):
                if coin < p:
                    arcs.append((newcomer, int(v)))
                    indegree[v] += 1
    undirected = Graph(n, tuple((u, v) for u, v in arcs))
    return SpaInstance(positions, tuple(arcs), undirected, m_dim, a1, a2, p)


@dataclass(frozen=True)
class HyperbolicInstance:
    """Points on the hyperbolic disc and the distance-threshold graph."""

    radii: np.ndarray
    angles: np.ndarray
    disc_radius: float
    alpha: float
    nu: float
    poissonised: bool
    graph: Graph


def hyperbolic(
    n: int,
    alpha: float,
    nu: float,
    seed: int,
    poissonised: bool = False,
) -> HyperbolicInstance:
    """Random hyperbolic graph on the disc of radius R with n = nu * e^(R/2).

    Radii follow the density alpha*sinh(alpha*r)/(cosh(alpha*R)-1), drawn
    by inverse CDF; angles are uniform on (0, 2pi]. Vertices are adjacent
    when their hyperbolic distance is at most R. With `poissonised` the
    number of points is Poisson(n) instead of exactly n.
    """
    if alpha <= 0 or nu <= 0:
        raise ValueError("alpha and nu must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng_from(seed)
    disc_radius = 2.0 * math.log(n / nu)
    if disc_radius <= 0:
        raise ValueError("n must exceed nu so the disc has positive radius")
    count = int(rng.poisson(n)) if poissonised else n
    if count < 1:
        raise ValueError("Poisson draw produced an empty point set; re-seed or grow n")
    radii = _hyperbolic_radius_cdf_inverse(rng.random(count), alpha, disc_radius)
    angles = (1.0 - rng.random(count)) * 2.0 * math.pi  # uniform on (0, 2pi]
    edges = _hyperbolic_edges(radii, angles, disc_radius)
    return HyperbolicInstance(
        radii, angles, disc_radius, alpha, nu, poissonised, Graph(count, edges)
    )


def _hyperbolic_radius_cdf_inverse(u: np.ndarray, alpha: float, disc_radius: float) -> np.ndarray:
    return np.arccosh(1.0 + u * (math.cosh(alpha * disc_radius) - 1.0)) / alpha


def _hyperbolic_edges(radii, angles, disc_radius, block: int = 512):
    count = len(radii)
    ch, sh = np.cosh(radii), np.sinh(radii)
    limit = math.cosh(disc_radius)
    edges: list[tuple[int, int]] = []
    for lo in range(0, count, block):
        hi = min(lo + block, count)
        dtheta = np.abs(angles[lo:hi, None] - angles[None, :])
        dtheta = np.minimum(dtheta, 2.0 * math.pi - dtheta)
        lhs = ch[lo:hi, None] * ch[None, :] - sh[lo:hi, None] * sh[None, :] * np.cos(dtheta)
        ii, jj = np.nonzero(lhs <= limit)
        ii = ii + lo
        keep = jj > ii
        edges.extend(zip(ii[keep].tolist(), jj[keep].tolist()))
    return tuple(edges)


def sector_partition(instance: HyperbolicInstance, k: int) -> Partition:
    """Partition the disc into k equal angular sectors and read off vertex parts.

    Empty sectors are dropped and part ids compacted.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    sector = np.ceil(instance.angles * k / (2.0 * math.pi)).astype(int)
    sector = np.clip(sector, 1, k)
    return Partition(tuple(int(s) for s in sector))


@dataclass(frozen=True)
class SbmInstance:
    """A stochastic block model draw with its planted partition.

    `planted` uses canonical part ids (relabelled by first appearance);
    `labels` keeps the raw model block of every vertex, which is what you
    want when merging or comparing specific blocks.
    """

    graph: Graph
    planted: Partition
    labels: tuple[int, ...]
    params: dict = field(compare=False)


def sbm_balanced(n: int, k: int, p: float, q: float, seed: int) -> SbmInstance:
    """Balanced stochastic block model: uniform labels, within-p, between-q.

    The graph is simple (no loops). Stream order: labels, then one coin
    per vertex pair.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if not (0.0 <= q <= p <= 1.0):
        raise ValueError(f"need 0 <= q <= p <= 1, got p={p}, q={q}")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng_from(seed)
    labels = rng.integers(0, k, size=n)
    iu, ju = np.triu_indices(n, 1)
    prob = np.where(labels[iu] == labels[ju], p, q)
    keep = rng.random(len(iu)) < prob
    edges = tuple(zip(iu[keep].tolist(), ju[keep].tolist()))
    raw = tuple(int(x) for x in labels)
    return SbmInstance(
        Graph(n, edges),
        Partition(raw),
        raw,
        {"n": n, "k": k, "p": p, "q": q, "seed": seed},
    )


def sbm_general(n: int, pi, P, rho: float, seed: int) -> SbmInstance:
    """General block model with label-dependent probabilities and loops.

    Labels are iid from pi; the pair (u, v) appears with probability
    rho * P[label_u, label_v], and each vertex independently carries a loop
    with probability rho * P[label_v, label_v]. Stream order: labels, pair
    coins, loop coins.
    """
    pi = np.asarray(pi, dtype=float)
    P = np.asarray(P, dtype=float)
    if pi.ndim != 1 or np.any(pi < 0) or not math.isclose(pi.sum(), 1.0, abs_tol=1e-9):
        raise ValueError("pi must be a probability vector")
    k = len(pi)
    if P.shape != (k, k):
        raise ValueError(f"P must be {k}x{k} to match pi")
    if not np.array_equal(P, P.T):
        raise ValueError("P must be symmetric")
    if np.any(P < 0) or np.any(P > 1):
        raise ValueError("P entries must be in [0, 1]")
    if not (0.0 < rho <= 1.0):
        raise ValueError("rho must be in (0, 1]")
    if rho * P.max() > 1.0 + 1e-12:
        raise ValueError("rho * max(P) must not exceed 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng_from(seed)
    labels = rng.choice(k, size=n, p=pi)
    iu, ju = np.triu_indices(n, 1)
    prob = rho * P[labels[iu], labels[ju]]
    keep = rng.random(len(iu)) < prob
    edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
    loop_prob = rho * P[labels, labels]
    loops = np.flatnonzero(rng.random(n) < loop_prob)
    edges.extend((int(v), int(v)) for v in loops)
    raw = tuple(int(x) for x in labels)
    return SbmInstance(
        Graph(n, tuple(edges)),
        Partition(raw),
        raw,
        {"n": n, "pi": tuple(pi), "P": P.tolist(), "rho": rho, "seed": seed},
    )


def planted_score_formula(p: float, q: float, k: int) -> float:
    """Asymptotic modularity score of the planted partition of the balanced model."""
    if k < 2:
        raise ValueError("k must be at least 2")
    denom = p + (k - 1) * q
    if denom <= 0:
        raise ValueError("p + (k-1) q must be positive")
    return (p - q) * (1.0 - 1.0 / k) / denom


def balanced_partition_coefficient(k: int) -> float:
    """Coefficient of 1/sqrt(c) achieved by a balanced k-part partition of a
    sparse binomial random graph with average degree c; maximal near k = 6."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k == 2:
        return 0.5
    return math.sqrt(2.0 * (k - 1) * math.log(k - 1)) / k


@dataclass
class PlantedOptimalityReport:
    """Per-pair check of the conditions under which modularity maximization
    recovers the planted partition of a general block model.

    `diagonal_holds[i]` requires block i to beat its expected-volume share;
    `pair_holds[(i, j)]` requires cross-block density to stay below it.
    `expected_form` carries the same inequalities written through expected
    edge counts and volumes of the loopless graph (they are algebraically
    identical; both sides are reported for cross-validation).
    """

    diagonal_holds: dict
    pair_holds: dict
    all_hold: bool
    expected_form: dict


def planted_optimality_conditions(pi, P, rho: float = 1.0, n: int = 1000) -> PlantedOptimalityReport:
    pi = np.asarray(pi, dtype=float)
    P = np.asarray(P, dtype=float)
    k = len(pi)
    if P.shape != (k, k) or not np.array_equal(P, P.T):
        raise ValueError("P must be a symmetric k x k matrix")
    pbar = float(pi @ P @ pi)
    if pbar == 0:
        raise ValueError("mean edge probability is zero")
    row = P @ pi
    diagonal = {i: bool(P[i, i] > row[i] ** 2 / pbar) for i in range(k)}
    pairs = {
        (i, j): bool(P[i, j] < row[i] * row[j] / pbar)
        for i in range(k)
        for j in range(i + 1, k)
    }
    pair_count = n * (n - 1) / 2.0
    exp_edges_total = rho * pair_count * pbar
    exp_vol_total = 2.0 * exp_edges_total
    expected = {}
    for i in range(k):
        exp_e_ii = rho * pair_count * pi[i] ** 2 * P[i, i]
        exp_vol_i = n * pi[i] * rho * (n - 1) * row[i]
        expected[("within", i)] = (
            exp_e_ii / exp_edges_total,
            (exp_vol_i / exp_vol_total) ** 2,
        )
    for i in range(k):
        for j in range(i + 1, k):
            exp_e_ij = rho * n * (n - 1) * pi[i] * pi[j] * P[i, j]
            exp_vol_i = n * pi[i] * rho * (n - 1) * row[i]
            exp_vol_j = n * pi[j] * rho * (n - 1) * row[j]
            expected[("between", i, j)] = (
                exp_e_ij / (2.0 * exp_edges_total),
                exp_vol_i * exp_vol_j / exp_vol_total**2,
            )
    return PlantedOptimalityReport(
        diagonal_holds=diagonal,
        pair_holds=pairs,
        all_hold=all(diagonal.values()) and all(pairs.values()),
        expected_form=expected,
    )


def wheels_graph(k: int) -> Graph:
    """Two disjoint wheels, each a k-cycle rim plus a centre joined to the rim."""
    if k < 3:
        raise ValueError("wheel rims need k >= 3")
    edges = []
    for offset, centre in ((0, k), (k + 1, 2 * k + 1)):
        rim = [offset + i for i in range(k)]
        edges.extend((rim[i], rim[(i + 1) % k]) for i in range(k))
        edges.extend((centre, v) for v in rim)
    return Graph(2 * k + 2, tuple(edges))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycles need n >= 3")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))
