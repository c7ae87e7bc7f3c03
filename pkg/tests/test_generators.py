import math
from fractions import Fraction

import numpy as np
import pytest

from modlab import (
    HyperbolicInstance,
    Partition,
    attachment_measure,
    balanced_partition_coefficient,
    build_graph,
    config_model,
    gnm,
    gnp,
    hyperbolic,
    modularity_score,
    planted_optimality_conditions,
    planted_score_formula,
    preferential_attachment,
    sbm_balanced,
    sbm_general,
    sector_partition,
    spa,
    wheels_graph,
)
from modlab.generators import _ball_radius, _hyperbolic_radius_cdf_inverse
from oracles import exact_measure_term

BICKEL_P = (
    (0.06, 0.04, 0.00),
    (0.04, 0.12, 0.04),
    (0.00, 0.04, 0.66),
)


# -- determinism ----------------------------------------------------------------


def test_generators_are_pure_functions_of_seed():
    assert gnp(40, 0.3, seed=5) == gnp(40, 0.3, seed=5)
    assert gnp(40, 0.3, seed=5) != gnp(40, 0.3, seed=6)
    assert gnm(30, 50, seed=1) == gnm(30, 50, seed=1)
    assert config_model(20, 3, seed=2) == config_model(20, 3, seed=2)
    assert (
        preferential_attachment(50, 2, seed=3).merged_graph
        == preferential_attachment(50, 2, seed=3).merged_graph
    )
    assert sbm_balanced(50, 2, 0.4, 0.1, seed=4).graph == sbm_balanced(50, 2, 0.4, 0.1, seed=4).graph
    a = hyperbolic(100, 0.8, 1.0, seed=7)
    b = hyperbolic(100, 0.8, 1.0, seed=7)
    assert a.graph == b.graph and np.array_equal(a.radii, b.radii)
    assert spa(40, 2, 1.0, 1.0, 0.7, seed=8).graph == spa(40, 2, 1.0, 1.0, 0.7, seed=8).graph


# -- gnp / gnm -------------------------------------------------------------------


def test_gnp_extremes():
    assert gnp(10, 0.0, seed=0).m == 0
    assert gnp(10, 1.0, seed=0).m == 45
    with pytest.raises(ValueError):
        gnp(10, 1.5, seed=0)


def test_gnp_edge_count_within_four_sigma():
    n, p = 2000, 0.01
    total = n * (n - 1) // 2
    g = gnp(n, p, seed=11)
    mean = total * p
    sigma = math.sqrt(total * p * (1 - p))
    assert abs(g.m - mean) <= 4 * sigma
    assert g.is_simple()


def test_gnp_dense_path_edge_count():
    n = 300
    p = 1 - 0.5 / n
    g = gnp(n, p, seed=12)
    total = n * (n - 1) // 2
    missing = total - g.m
    mean = total * (1 - p)
    sigma = math.sqrt(total * (1 - p) * p)
    assert abs(missing - mean) <= 4 * sigma


def test_gnm_exact_count_and_extremes():
    assert gnm(12, 0, seed=0).m == 0
    assert gnm(6, 15, seed=0).m == 15  # complete
    g = gnm(40, 100, seed=13)
    assert g.m == 100
    assert g.is_simple()
    assert sum(g.degrees) == 200
    with pytest.raises(ValueError):
        gnm(5, 11, seed=0)


# -- configuration model ------------------------------------------------------------


def test_config_model_parity_and_degrees():
    with pytest.raises(ValueError, match="even"):
        config_model(5, 3, seed=0)
    g = config_model(30, 2, seed=14)
    assert all(d == 2 for d in g.degrees)
    assert g.m == 30


def test_config_model_r1_is_perfect_matching():
    n = 12
    g = config_model(n, 1, seed=15)
    assert all(d == 1 for d in g.degrees)
    per_edge = Partition.from_parts([set(e) for e in g.edges], n)
    assert modularity_score(g, per_edge).q == pytest.approx(1 - 2 / n)


def test_config_model_erased_and_rejection_are_simple():
    assert config_model(40, 3, seed=16, mode="erased").is_simple()
    assert config_model(40, 3, seed=17, mode="rejection").is_simple()
    deg = config_model(40, 3, seed=18, mode="rejection").degrees
    assert all(d == 3 for d in deg)


# -- preferential attachment ----------------------------------------------------------


def test_pa_single_vertex_is_one_loop():
    trace = preferential_attachment(1, 1, seed=0)
    assert trace.merged_graph.edges == ((0, 0),)
    assert trace.merged_graph.degree(0) == 2


def test_pa_edge_and_degree_counts():
    for n, h in ((100, 1), (60, 2), (25, 5)):
        trace = preferential_attachment(n, h, seed=19)
        assert trace.merged_graph.m == h * n
        assert sum(trace.merged_graph.degrees) == 2 * h * n
        assert trace.mini_graph.n == h * n
        assert trace.mini_graph.m == h * n


def test_pa_first_attachment_probabilities():
    # second mini-vertex attaches to the first with chance 2/3, loops with 1/3
    loops = 0
    trials = 3000
    for s in range(trials):
        trace = preferential_attachment(2, 1, seed=s)
        edges = trace.mini_graph.edges
        if (1, 1) in edges:
            loops += 1
    mean = trials / 3
    sigma = math.sqrt(trials * (1 / 3) * (2 / 3))
    assert abs(loops - mean) <= 4 * sigma


# -- attachment measure ----------------------------------------------------------------


def test_attachment_measure_examples():
    assert attachment_measure([]) == 0.0
    assert attachment_measure([1]) == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-12)
    assert attachment_measure([1, 2]) == pytest.approx(1.5 * math.sqrt(math.pi) / 2, abs=1e-12)
    assert attachment_measure([1]) == pytest.approx(0.886227, abs=1e-6)
    assert attachment_measure([1, 2]) == pytest.approx(1.329340, abs=1e-6)
    with pytest.raises(ValueError):
        attachment_measure([0])


def test_attachment_measure_against_exact_double_factorials():
    exact = sum((exact_measure_term(j) for j in range(1, 51)), Fraction(0))
    got = attachment_measure(range(1, 51))
    assert got == pytest.approx(0.5 * math.sqrt(math.pi) * float(exact), abs=1e-12)
    for j in (1, 2, 3, 7, 20, 50):
        assert attachment_measure([j]) == pytest.approx(
            0.5 * math.sqrt(math.pi) * float(exact_measure_term(j)), abs=1e-13
        )


def test_attachment_measure_ratio_asymptotics():
    scale = 0.5 * math.sqrt(math.pi)
    previous = attachment_measure([1]) / scale
    for j in (2, 5, 10, 100, 1000):
        ratio = attachment_measure([j]) / scale
        assert ratio < previous
        previous = ratio
    j = 10_000
    ratio = attachment_measure([j]) / scale
    assert ratio * math.sqrt(math.pi * j) == pytest.approx(1.0, abs=1e-4)


# -- SPA -------------------------------------------------------------------------------


def test_spa_single_vertex_and_validation():
    inst = spa(1, 2, 1.0, 1.0, 0.5, seed=0)
    assert inst.graph.m == 0
    with pytest.raises(ValueError):
        spa(5, 4, 1.0, 1.0, 0.5, seed=0)
    with pytest.raises(ValueError):
        spa(5, 2, 1.0, 1.0, 0.0, seed=0)


def test_spa_full_volume_spheres_reach_everyone():
    # a2 enormous: every sphere has volume 1, p = 1: the graph is complete
    n = 15
    inst = spa(n, 2, 1.0, 1000.0, 1.0, seed=21)
    assert inst.graph.m == n * (n - 1) // 2


def test_spa_one_dimensional_ball_is_interval():
    assert _ball_radius(0.3, 1) == pytest.approx(0.15)
    assert _ball_radius(1.0, 2) == pytest.approx(1 / math.sqrt(math.pi))


def test_spa_in_degree_drives_spheres():
    inst = spa(200, 2, 4.0, 1.0, 0.9, seed=22)
    indeg = np.zeros(200, dtype=int)
    for _, v in inst.directed_edges:
        indeg[v] += 1
    # the undirected projection has one edge per arc
    assert inst.graph.m == len(inst.directed_edges)
    assert indeg.sum() == len(inst.directed_edges)
    # earlier vertices accumulate larger in-degree on average
    early = indeg[:50].mean()
    late = indeg[150:].mean()
    assert early > late


# -- hyperbolic ---------------------------------------------------------------------------


def test_hyperbolic_disc_radius_formula():
    inst = hyperbolic(100, 0.8, 1.0, seed=23)
    assert inst.disc_radius == pytest.approx(2 * math.log(100))
    inst2 = hyperbolic(100, 0.8, 2.0, seed=23)
    assert inst2.disc_radius == pytest.approx(2 * math.log(50))


def test_hyperbolic_inverse_cdf_endpoints():
    r = _hyperbolic_radius_cdf_inverse(np.array([0.0, 1.0]), 0.75, 10.0)
    assert r[0] == pytest.approx(0.0, abs=1e-12)
    assert r[1] == pytest.approx(10.0, abs=1e-9)


def test_hyperbolic_coincident_points_are_adjacent():
    from modlab.generators import _hyperbolic_edges

    edges = _hyperbolic_edges(np.array([3.0, 3.0]), np.array([1.0, 1.0]), 5.0)
    assert edges == ((0, 1),)


def test_hyperbolic_radial_cdf_kolmogorov_smirnov():
    alpha, R = 0.75, 12.0
    rng = np.random.default_rng(24)
    samples = _hyperbolic_radius_cdf_inverse(rng.random(100_000), alpha, R)
    samples = np.sort(samples)
    cdf = (np.cosh(alpha * samples) - 1.0) / (math.cosh(alpha * R) - 1.0)
    grid = np.arange(1, len(samples) + 1) / len(samples)
    ks = float(np.max(np.abs(cdf - grid)))
    assert ks < 0.01


def test_hyperbolic_poissonised_count_varies():
    counts = {hyperbolic(200, 0.8, 1.0, seed=s, poissonised=True).graph.n for s in range(5)}
    assert len(counts) > 1


def test_sector_partition_rules():
    inst = HyperbolicInstance(
        radii=np.array([1.0, 1.0, 1.0]),
        angles=np.array([0.1, 0.2, 0.3]),
        disc_radius=5.0,
        alpha=0.75,
        nu=1.0,
        poissonised=False,
        graph=build_graph(3, [(0, 1)]),
    )
    assert sector_partition(inst, 4).k == 1  # all in one sector

    two = HyperbolicInstance(
        radii=np.array([1.0, 1.0]),
        angles=np.array([math.pi / 2, 3 * math.pi / 2]),
        disc_radius=5.0,
        alpha=0.75,
        nu=1.0,
        poissonised=False,
        graph=build_graph(2, [(0, 1)]),
    )
    part = sector_partition(two, 2)
    assert part.k == 2
    inst3 = hyperbolic(300, 0.75, 1.0, seed=25)
    part3 = sector_partition(inst3, 10)
    assert part3.n == inst3.graph.n  # covers every sampled point


# -- stochastic block models -------------------------------------------------------------


def test_sbm_balanced_reduces_to_gnp_when_p_equals_q():
    n, p = 400, 0.05
    g = sbm_balanced(n, 3, p, p, seed=26).graph
    total = n * (n - 1) // 2
    mean = total * p
    sigma = math.sqrt(total * p * (1 - p))
    assert abs(g.m - mean) <= 4 * sigma


def test_sbm_balanced_extremes():
    inst = sbm_balanced(60, 3, 1.0, 0.0, seed=27)
    labels = inst.planted.assignment
    for u in range(60):
        for v in range(u + 1, 60):
            edge_present = (u, v) in inst.graph.edges
            assert edge_present == (labels[u] == labels[v])
    assert inst.graph.is_simple()
    with pytest.raises(ValueError):
        sbm_balanced(60, 3, 0.1, 0.5, seed=0)


def test_sbm_general_extremes_and_loops():
    zero = sbm_general(30, (0.5, 0.5), ((0.0, 0.0), (0.0, 0.0)), rho=1.0, seed=28)
    assert zero.graph.m == 0
    single = sbm_general(200, (1.0,), ((0.08,),), rho=1.0, seed=29)
    loops = sum(single.graph.loop_counts)
    mean_loops = 200 * 0.08
    assert abs(loops - mean_loops) <= 4 * math.sqrt(200 * 0.08 * 0.92)
    total = 200 * 199 / 2
    non_loop = single.graph.m - loops
    assert abs(non_loop - total * 0.08) <= 4 * math.sqrt(total * 0.08 * 0.92)
    with pytest.raises(ValueError, match="symmetric"):
        sbm_general(10, (0.5, 0.5), ((0.1, 0.2), (0.3, 0.1)), rho=1.0, seed=0)


def test_bickel_three_block_scores():
    inst = sbm_general(1500, (1 / 3, 1 / 3, 1 / 3), BICKEL_P, rho=1.0, seed=30)
    planted = modularity_score(inst.graph, inst.planted)
    merged_two_sparse = Partition(tuple(0 if b in (0, 1) else 1 for b in inst.labels))
    merged = modularity_score(inst.graph, merged_two_sparse)
    assert planted.q == pytest.approx(0.30, abs=0.03)
    assert merged.q == pytest.approx(0.34, abs=0.03)
    assert merged.q > planted.q


def test_planted_score_formula():
    assert planted_score_formula(0.3, 0.3, 4) == 0.0
    assert planted_score_formula(0.3, 0.0, 4) == pytest.approx(0.75)
    assert planted_score_formula(0.1, 0.02, 3) == pytest.approx(0.380952, abs=1e-6)
    with pytest.raises(ValueError):
        planted_score_formula(0.0, 0.0, 3)


def test_balanced_partition_coefficient_values():
    assert balanced_partition_coefficient(2) == 0.5
    assert balanced_partition_coefficient(3) == pytest.approx(
        math.sqrt(4 * math.log(2)) / 3, abs=1e-12
    )
    assert balanced_partition_coefficient(3) == pytest.approx(0.555, abs=5e-4)
    assert balanced_partition_coefficient(6) == pytest.approx(0.6686, abs=2e-4)
    # k = 6 is the sweet spot the sparse lower bound uses
    values = {k: balanced_partition_coefficient(k) for k in range(2, 12)}
    assert max(values, key=values.get) == 6


def test_planted_optimality_conditions():
    p, q, k = 0.1, 0.02, 3
    P = tuple(
        tuple(p if i == j else q for j in range(k)) for i in range(k)
    )
    report = planted_optimality_conditions((1 / 3,) * 3, P)
    assert report.all_hold

    bickel = planted_optimality_conditions((1 / 3,) * 3, BICKEL_P)
    assert not bickel.all_hold
    assert not bickel.pair_holds[(0, 1)]  # merging these two blocks wins

    const = planted_optimality_conditions((0.5, 0.5), ((0.2, 0.2), (0.2, 0.2)))
    assert not const.all_hold
    assert not all(const.diagonal_holds.values())  # equality, not strict

    # the expected-count form is the same inequality after cancellation
    for (kind, *idx), (lhs, rhs) in report.expected_form.items():
        if kind == "within":
            assert (lhs > rhs) == report.diagonal_holds[idx[0]]
        else:
            assert (lhs < rhs) == report.pair_holds[tuple(idx)]


def test_wheels_graph_structure():
    g = wheels_graph(3)
    assert g.n == 8 and g.m == 12
    for k in (3, 5, 8):
        w = wheels_graph(k)
        assert w.n == 2 * k + 2 and w.m == 4 * k
        degrees = sorted(w.degrees)
        assert degrees[-2:] == [k, k]  # two centres
        assert all(d == 3 for d in degrees[:-2])  # rim vertices
    with pytest.raises(ValueError):
        wheels_graph(2)
