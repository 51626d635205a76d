"""k-means, spectral embedding, similarity fusion and the SC / PPC / IPS2 pipelines."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from opentelemetry import trace
from scipy.spatial.distance import cdist
from sklearn.cluster import kmeans_plusplus

from ips2.errors import SizeError
from ips2.highorder import high_order_similarity
from ips2.models.config import ClusterConfig, EmbedMode
from ips2.models.dataset import Dataset
from ips2.models.matrices import (
    DistanceMatrix,
    HighOrderSimilarity,
    SimilarityMatrix,
    SparseSymMatrix,
)
from ips2.models.results import ClusteringResult, Diagnostics
from ips2.pairwise import knn_sets, pairwise_distances, pairwise_similarity
from ips2.seeding import Stream, rng_for
from ips2.spectral import laplacian_eigenpairs
from ips2.tensorsim import build_sparse_tensor

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

EIGENGAP_FLOOR = 1e-10


def fuse(s: SimilarityMatrix, v: SimilarityMatrix) -> SimilarityMatrix:
    """Elementwise mean ``(S + V) / 2``.

    Raises:
        SizeError: If the matrices differ in size.
    """
    if s.values.shape != v.values.shape:
        raise SizeError(f"cannot fuse {s.values.shape} with {v.values.shape}")
    with tracer.start_as_current_span("ips2.fuse"):
        return SimilarityMatrix(0.5 * (s.values + v.values))


def _repair_empty(
    labels: np.ndarray, sq_dist: np.ndarray, c: int
) -> np.ndarray:
    counts = np.bincount(labels, minlength=c)
    for group in np.flatnonzero(counts == 0):
        own = sq_dist[np.arange(labels.size), labels]
        movable = counts[labels] > 1
        candidate = int(np.argmax(np.where(movable, own, -np.inf)))
        counts[labels[candidate]] -= 1
        labels[candidate] = group
        counts[group] = 1
    return labels


def _lloyd(
    points: np.ndarray, centers: np.ndarray, max_iter: int, tol: float
) -> tuple[np.ndarray, float, list[float]]:
    c = centers.shape[0]
    history: list[float] = []
    labels = np.zeros(points.shape[0], dtype=np.int64)
    for _ in range(max_iter):
        sq_dist = cdist(points, centers, metric="sqeuclidean")
        labels = _repair_empty(np.argmin(sq_dist, axis=1), sq_dist, c)
        updated = np.vstack([points[labels == g].mean(axis=0) for g in range(c)])
        history.append(float(np.sum((points - updated[labels]) ** 2)))
        shift = float(np.max(np.linalg.norm(updated - centers, axis=1)))
        centers = updated
        if shift < tol:
            break
    return labels, history[-1], history


def kmeans(points: np.ndarray, c: int, cfg: ClusterConfig) -> ClusteringResult:
    """Best of ``cfg.restarts`` k-means++ seeded Lloyd runs, by within-cluster SSE.

    Lloyd iterations stop once no centroid moves by ``cfg.kmeans_tol`` or after
    ``cfg.kmeans_max_iter`` iterations. A cluster left empty takes the point that
    lies farthest from its own centroid among clusters with more than one member.

    Raises:
        SizeError: If there are fewer points than clusters.
    """
    points = np.asarray(points, dtype=float)
    if points.shape[0] < c:
        raise SizeError(f"cannot form {c} clusters from {points.shape[0]} points")

    with tracer.start_as_current_span("ips2.kmeans", attributes={"c": c}):
        rng = rng_for(cfg.seed, Stream.KMEANS)
        best: tuple[np.ndarray, float, list[float]] | None = None
        for _ in range(cfg.restarts):
            centers, _ = kmeans_plusplus(
                points, c, random_state=int(rng.integers(0, 2**31 - 1))
            )
            run = _lloyd(points, centers, cfg.kmeans_max_iter, cfg.kmeans_tol)
            if best is None or run[1] < best[1]:
                best = run
        assert best is not None
        labels, objective, history = best
        return ClusteringResult(
            labels=labels, objective=objective, diagnostics=Diagnostics(objective_history=history)
        )


def spectral_embed(
    a: SimilarityMatrix | np.ndarray,
    c: int,
    cfg: ClusterConfig,
    diagnostics: Diagnostics | None = None,
) -> np.ndarray:
    """Rows of the top-``c`` eigenvectors of the normalized Laplacian, unit length.

    All-zero rows stay zero. When the ``c``-th and ``(c+1)``-th eigenvalues coincide
    the embedding is not unique and ``degenerate_embedding`` is flagged.
    """
    similarity = a if isinstance(a, SimilarityMatrix) else SimilarityMatrix(a)
    m = similarity.m
    wanted = c + 1 if c < m else c
    with tracer.start_as_current_span("ips2.embed", attributes={"m": m, "c": c}):
        pairs = laplacian_eigenpairs(
            similarity, wanted, cfg.eig_tol, cfg.eig_max_iter, cfg.seed, cfg.dense_cap
        )
        if diagnostics is not None:
            diagnostics.eig_residuals.setdefault("embed", []).extend(
                pairs.residuals[:c].tolist()
            )
        if wanted > c and pairs.values[c - 1] - pairs.values[c] <= EIGENGAP_FLOOR:
            logger.warning(
                f"Eigengap between eigenvalues {c} and {c + 1} vanished; embedding is degenerate"
            )
            if diagnostics is not None:
                diagnostics.flag("degenerate_embedding")

        embedding = pairs.vectors[:, :c]
        norms = np.linalg.norm(embedding, axis=1, keepdims=True)
        return np.divide(
            embedding, norms, out=np.zeros_like(embedding), where=norms > 0
        )


@dataclass(frozen=True, eq=False)
class HighOrderStage:
    """Intermediate products of the tensor branch."""

    tensor: SparseSymMatrix
    similarity: HighOrderSimilarity


def _check_size(dataset: Dataset, cfg: ClusterConfig) -> None:
    if dataset.m < cfg.c:
        raise SizeError(f"cannot form {cfg.c} clusters from {dataset.m} samples")


def compute_pairwise(dataset: Dataset, cfg: ClusterConfig) -> tuple[DistanceMatrix, SimilarityMatrix]:
    """Distances and Gaussian similarity S for ``dataset``."""
    dist = pairwise_distances(dataset)
    return dist, pairwise_similarity(dist, cfg.kernel_bandwidth)


def compute_high_order(
    dist: DistanceMatrix, cfg: ClusterConfig, diagnostics: Diagnostics | None = None
) -> HighOrderStage:
    """Sparse tensor, its Laplacian eigenvectors and the folded similarity V.

    ``cfg.k`` is capped at ``m - 1`` for datasets smaller than the neighborhood.
    """
    m = dist.m
    k = cfg.k
    if k > m - 1:
        logger.warning(f"k={k} exceeds m-1={m - 1}; using k={m - 1}")
        k = m - 1
    params = cfg.tensor.model_copy(update={"k": k})
    tensor = build_sparse_tensor(dist, knn_sets(dist, k), params)
    pairs = laplacian_eigenpairs(
        tensor, cfg.c, cfg.eig_tol, cfg.eig_max_iter, cfg.seed, cfg.dense_cap
    )
    similarity = high_order_similarity(pairs, m, cfg.c)
    if diagnostics is not None:
        diagnostics.eig_residuals.setdefault("tensor", []).extend(pairs.residuals.tolist())
        if similarity.degenerate:
            diagnostics.flag("degenerate_high_order")
    return HighOrderStage(tensor=tensor, similarity=similarity)


def _cluster_similarity(
    a: SimilarityMatrix, cfg: ClusterConfig, diagnostics: Diagnostics
) -> ClusteringResult:
    embedding = spectral_embed(a, cfg.c, cfg, diagnostics)
    return _finish(kmeans(embedding, cfg.c, cfg), diagnostics)


def _finish(result: ClusteringResult, diagnostics: Diagnostics) -> ClusteringResult:
    diagnostics.objective_history = result.diagnostics.objective_history
    return ClusteringResult(result.labels, result.objective, diagnostics)


def run_sc(dataset: Dataset, cfg: ClusterConfig) -> ClusteringResult:
    """Spectral clustering on the Gaussian pairwise similarity."""
    _check_size(dataset, cfg)
    diagnostics = Diagnostics()
    _, s = compute_pairwise(dataset, cfg)
    return _cluster_similarity(s, cfg, diagnostics)


def run_ppc(dataset: Dataset, cfg: ClusterConfig) -> ClusteringResult:
    """Spectral clustering on the high-order similarity alone."""
    _check_size(dataset, cfg)
    diagnostics = Diagnostics()
    dist = pairwise_distances(dataset)
    v = compute_high_order(dist, cfg, diagnostics).similarity
    return _cluster_similarity(v, cfg, diagnostics)


def run_ips2(dataset: Dataset, cfg: ClusterConfig) -> ClusteringResult:
    """Cluster the fused similarity ``(S + V) / 2``.

    ``embed_mode=spectral`` embeds the fused matrix like SC does before k-means;
    ``embed_mode=rows`` runs k-means directly on its rows.
    """
    _check_size(dataset, cfg)
    diagnostics = Diagnostics()
    dist, s = compute_pairwise(dataset, cfg)
    v = compute_high_order(dist, cfg, diagnostics).similarity
    u = fuse(s, v)
    if cfg.embed_mode is EmbedMode.ROWS:
        return _finish(kmeans(u.values, cfg.c, cfg), diagnostics)
    return _cluster_similarity(u, cfg, diagnostics)


PIPELINES = {
    "sc": run_sc,
    "ppc": run_ppc,
    "ips2": run_ips2,
}
