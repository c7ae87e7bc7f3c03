"""modlab: a graph-modularity laboratory.

Modularity scores and their weighted/relative variants, exact and
heuristic partition searches, spectral and subset upper bounds, seeded
generators for the classical random-graph models, percolation and
vertex-sampling machinery, and a reproducible experiment harness with a
CLI front end (`modlab --help`).
"""

from .graph import (
    EdgeListFormatError,
    Graph,
    Partition,
    WeightFunction,
    build_graph,
    internal_edges,
    load_edge_list,
    load_partition,
    save_edge_list,
    save_partition,
    volume,
)
from .modularity import (
    EnumerationCapError,
    ModularityBreakdown,
    RelativeModularityResult,
    expected_random_partition_score,
    max_relative_modularity,
    modularity_score,
    partition_score_via_relative,
    relative_modularity,
    resolution_limit_components,
    subset_bipartition_bound,
    weighted_modularity_score,
)
from .search import (
    SearchResult,
    arc_partition,
    best_bipartition_exhaustive,
    exact_modularity,
    greedy_amalgamate,
    local_moving,
    merge_to_k,
    percolation_transfer,
    swap_bipartition,
)
from .spectral import Spectrum, normalized_laplacian, spectral_gap, spectral_upper_bound
from .generators import (
    HyperbolicInstance,
    PaTrace,
    PlantedOptimalityReport,
    SbmInstance,
    SpaInstance,
    attachment_measure,
    balanced_partition_coefficient,
    config_model,
    cycle_graph,
    gnm,
    gnp,
    hyperbolic,
    planted_optimality_conditions,
    planted_score_formula,
    preferential_attachment,
    rng_from,
    sbm_balanced,
    sbm_general,
    sector_partition,
    spa,
    wheels_graph,
)
from .percolation import (
    PercolationRun,
    ProbeSummary,
    VertexSample,
    blow_up,
    cut_distance,
    estimability_probe,
    percolate,
    percolate_run,
    percolate_weighted,
    vertex_sample,
)
from .experiments import (
    ExperimentRecord,
    ExperimentSpec,
    REGISTRY,
    emit,
    load_spec,
    run_experiment,
)

__version__ = "0.1.0"
