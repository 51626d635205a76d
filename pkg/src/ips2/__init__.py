"""Clustering with fused pairwise and high-order (pair-to-pair) similarity."""

from ips2.cluster import (
    compute_high_order,
    compute_pairwise,
    fuse,
    kmeans,
    run_ips2,
    run_ppc,
    run_sc,
    spectral_embed,
)
from ips2.dataset import load_csv, standardize, write_csv
from ips2.errors import (
    ConvergenceError,
    DomainError,
    ErrorCode,
    ErrorContract,
    Ips2Error,
    ParameterError,
    ParseError,
    SizeError,
    TensorIndexError,
    UsageError,
)
from ips2.highorder import high_order_similarity
from ips2.metrics import accuracy, ari, evaluate, f_score_pairs, hungarian, nmi, purity
from ips2.models import (
    ClusterConfig,
    ClusteringResult,
    Dataset,
    EmbedMode,
    ExperimentSpec,
    Method,
    MetricsReport,
    NoiseKind,
    NoiseModel,
    Standardization,
    TensorParams,
)
from ips2.pairwise import gaussian_similarity, knn_sets, pairwise_distances
from ips2.spectral import normalized_laplacian, top_eigenpairs
from ips2.synthgen import (
    add_noise,
    gen_gaussian_clusters,
    gen_usdata1,
    gen_usdata2,
    make_noise_model,
)
from ips2.tensorsim import build_sparse_tensor, decomposable_unfolded

__all__ = [
    "ClusterConfig",
    "ClusteringResult",
    "ConvergenceError",
    "Dataset",
    "DomainError",
    "EmbedMode",
    "ErrorCode",
    "ErrorContract",
    "ExperimentSpec",
    "Ips2Error",
    "Method",
    "MetricsReport",
    "NoiseKind",
    "NoiseModel",
    "ParameterError",
    "ParseError",
    "SizeError",
    "Standardization",
    "TensorIndexError",
    "TensorParams",
    "UsageError",
    "accuracy",
    "add_noise",
    "ari",
    "build_sparse_tensor",
    "compute_high_order",
    "compute_pairwise",
    "decomposable_unfolded",
    "evaluate",
    "f_score_pairs",
    "fuse",
    "gaussian_similarity",
    "gen_gaussian_clusters",
    "gen_usdata1",
    "gen_usdata2",
    "high_order_similarity",
    "hungarian",
    "kmeans",
    "knn_sets",
    "load_csv",
    "make_noise_model",
    "nmi",
    "normalized_laplacian",
    "pairwise_distances",
    "purity",
    "run_ips2",
    "run_ppc",
    "run_sc",
    "spectral_embed",
    "standardize",
    "top_eigenpairs",
    "write_csv",
]
