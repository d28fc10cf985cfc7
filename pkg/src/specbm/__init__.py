"""Spectral clustering of stochastic block models with regularized and
degree-corrected Laplacians, plus data-driven tau selection and a
Monte-Carlo harness."""

from .clustering import (
    ClusteringResult,
    KMeansConfig,
    assign_labels,
    geometric_median,
    hausdorff,
    kmeans,
    kmedians_modified,
    row_normalize,
    spectral_cluster,
)
from .errors import (
    AllInfinite,
    DegenerateBlock,
    DegenerateGrid,
    EmptyCluster,
    EmptySet,
    LengthMismatch,
    MissingCell,
    MissingTheta,
    NoConvergence,
    NonFinite,
    ProbOutOfRange,
    RankDeficient,
    SingularDegree,
    SpecbmError,
    TooFewPoints,
    ZeroCommunityDegree,
)
from .experiments import (
    CSV_HEADER,
    ExperimentConfig,
    ExperimentRecord,
    load_model_file,
    read_records,
    run_experiment,
    run_replication,
    summarize_records,
    table_rows,
    write_records,
)
from .graphgen import (
    RngSeed,
    as_generator,
    dgp_preset,
    four_param_sbm,
    read_edge_list,
    sample_adjacency,
    sampling_prob_matrix,
    write_edge_list,
)
from .laplacian import DegreeVector, build_laplacian, degrees, validate_adjacency
from .linalg import EigenDecomposition, eig_sym, orthogonal_align, spectral_norm
from .metrics import ccp, nmi
from .sbm import (
    AssumptionReport,
    BlockModel,
    Membership,
    PopulationSummary,
    assumption_report,
    edge_prob_matrix,
    normalized_block_matrix,
    population_laplacian,
    population_spectrum,
)
from .tau import (
    AdaptiveResult,
    PlugInModel,
    TauGrid,
    TauSelection,
    adaptive_cluster,
    estimate_block_matrix,
    estimate_theta,
    plug_in_laplacian,
    plug_in_spectrum,
    q_criterion,
    select_tau,
    tau_grid,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveResult",
    "AllInfinite",
    "AssumptionReport",
    "BlockModel",
    "CSV_HEADER",
    "ClusteringResult",
    "DegenerateBlock",
    "DegenerateGrid",
    "DegreeVector",
    "EigenDecomposition",
    "EmptyCluster",
    "EmptySet",
    "ExperimentConfig",
    "ExperimentRecord",
    "KMeansConfig",
    "LengthMismatch",
    "Membership",
    "MissingCell",
    "MissingTheta",
    "NoConvergence",
    "NonFinite",
    "PlugInModel",
    "PopulationSummary",
    "ProbOutOfRange",
    "RankDeficient",
    "RngSeed",
    "SingularDegree",
    "SpecbmError",
    "TauGrid",
    "TauSelection",
    "TooFewPoints",
    "ZeroCommunityDegree",
    "adaptive_cluster",
    "as_generator",
    "assign_labels",
    "assumption_report",
    "build_laplacian",
    "ccp",
    "degrees",
    "dgp_preset",
    "edge_prob_matrix",
    "eig_sym",
    "estimate_block_matrix",
    "estimate_theta",
    "four_param_sbm",
    "geometric_median",
    "hausdorff",
    "kmeans",
    "kmedians_modified",
    "load_model_file",
    "nmi",
    "normalized_block_matrix",
    "orthogonal_align",
    "plug_in_laplacian",
    "plug_in_spectrum",
    "population_laplacian",
    "population_spectrum",
    "q_criterion",
    "read_edge_list",
    "read_records",
    "row_normalize",
    "run_experiment",
    "run_replication",
    "sample_adjacency",
    "sampling_prob_matrix",
    "select_tau",
    "spectral_cluster",
    "spectral_norm",
    "summarize_records",
    "table_rows",
    "tau_grid",
    "validate_adjacency",
    "write_edge_list",
    "write_records",
    "write_trace",
]
