"""Value types, configuration and report contracts."""

from ips2.models.config import (
    ClusterConfig,
    EmbedMode,
    NoiseKind,
    NoiseModel,
    Standardization,
    TensorParams,
)
from ips2.models.dataset import Dataset
from ips2.models.matrices import (
    DistanceMatrix,
    EigenPairs,
    HighOrderSimilarity,
    NeighborSets,
    SimilarityMatrix,
    SparseSymMatrix,
)
from ips2.models.messages import LogMessage, TraceMessage
from ips2.models.report import (
    SCHEMA_VERSION,
    DatasetInfo,
    DatasetSource,
    ExperimentSpec,
    MethodSummary,
    MetricsReport,
    MetricSummary,
    RunRecord,
    WarningRecord,
)
from ips2.models.results import ClusteringResult, Diagnostics
from ips2.models.run import BenchRun, Method

__all__ = [
    "BenchRun",
    "ClusterConfig",
    "ClusteringResult",
    "Dataset",
    "DatasetInfo",
    "DatasetSource",
    "Diagnostics",
    "DistanceMatrix",
    "EigenPairs",
    "EmbedMode",
    "ExperimentSpec",
    "HighOrderSimilarity",
    "LogMessage",
    "Method",
    "MethodSummary",
    "MetricSummary",
    "MetricsReport",
    "NeighborSets",
    "NoiseKind",
    "NoiseModel",
    "RunRecord",
    "SCHEMA_VERSION",
    "SimilarityMatrix",
    "SparseSymMatrix",
    "Standardization",
    "TensorParams",
    "TraceMessage",
    "WarningRecord",
]
