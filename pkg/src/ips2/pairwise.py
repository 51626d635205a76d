"""Distances, Gaussian-kernel similarity and symmetrized nearest-neighbor sets."""

from __future__ import annotations

import logging
from typing import Literal

import numpy as np
from opentelemetry import trace
from scipy.spatial.distance import pdist, squareform

from ips2.errors import ParameterError
from ips2.models.dataset import Dataset
from ips2.models.matrices import DistanceMatrix, NeighborSets, SimilarityMatrix

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)


def pairwise_distances(dataset: Dataset) -> DistanceMatrix:
    """Euclidean distances between all samples.

    Each unordered pair is evaluated once, so the result is exactly symmetric with a
    zero diagonal.
    """
    with tracer.start_as_current_span("ips2.distances", attributes={"m": dataset.m}):
        return DistanceMatrix(squareform(pdist(dataset.samples, metric="euclidean")))


def median_bandwidth(dist: DistanceMatrix) -> float:
    """Median of the off-diagonal upper-triangle distances, or 1 when that is 0."""
    upper = dist.values[np.triu_indices(dist.m, k=1)]
    median = float(np.median(upper))
    if median == 0.0:
        logger.warning("All samples coincide; using kernel bandwidth 1")
        return 1.0
    return median


def gaussian_similarity(dist: DistanceMatrix, sigma_s: float) -> SimilarityMatrix:
    """Gaussian kernel ``exp(-d^2 / (2 sigma_s^2))`` with a unit diagonal.

    Raises:
        ParameterError: If ``sigma_s`` is not positive.
    """
    if not sigma_s > 0:
        raise ParameterError(f"kernel bandwidth must be positive, got {sigma_s}")
    values = np.exp(-np.square(dist.values) / (2.0 * sigma_s * sigma_s))
    np.fill_diagonal(values, 1.0)
    return SimilarityMatrix(values)


def resolve_bandwidth(dist: DistanceMatrix, bandwidth: Literal["median"] | float) -> float:
    """Return the kernel bandwidth configured as ``median`` or a fixed value."""
    if bandwidth == "median":
        return median_bandwidth(dist)
    return float(bandwidth)


def pairwise_similarity(
    dist: DistanceMatrix, bandwidth: Literal["median"] | float = "median"
) -> SimilarityMatrix:
    """Gaussian similarity with the configured bandwidth."""
    with tracer.start_as_current_span("ips2.pairwise_similarity"):
        sigma_s = resolve_bandwidth(dist, bandwidth)
        logger.debug(f"Gaussian kernel bandwidth {sigma_s:.6g}")
        return gaussian_similarity(dist, sigma_s)


def knn_sets(dist: DistanceMatrix, k: int) -> NeighborSets:
    """Symmetrized, self-inclusive k-nearest-neighbor sets.

    Raw neighbors are the ``k`` closest other samples, ties going to the lower
    index. The returned set for ``i`` is its raw neighbors, every ``j`` that lists
    ``i`` as a raw neighbor, and ``i`` itself.

    Raises:
        ParameterError: If ``k`` is outside ``1..m-1``.
    """
    m = dist.m
    if not 1 <= k <= m - 1:
        raise ParameterError(f"k must lie in 1..{m - 1}, got {k}")

    with tracer.start_as_current_span("ips2.knn", attributes={"k": k}):
        indices = np.arange(m)
        relation = np.zeros((m, m), dtype=bool)
        for i in range(m):
            others = indices[indices != i]
            order = np.lexsort((others, dist.values[i, others]))
            relation[i, others[order[:k]]] = True

        relation |= relation.T
        np.fill_diagonal(relation, True)
        neighbors = tuple(np.flatnonzero(row) for row in relation)
        logger.debug(
            f"kNN sets: k={k}, mean size {np.mean([n.size for n in neighbors]):.2f}"
        )
        return NeighborSets(neighbors=neighbors, k=k)
