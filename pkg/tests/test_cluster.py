from collections.abc import Callable
from itertools import product

import numpy as np
import pytest
import scipy.linalg
from pytest_mock import MockerFixture

from ips2.cluster import PIPELINES, fuse, kmeans, run_ips2, run_ppc, run_sc, spectral_embed
from ips2.errors import SizeError
from ips2.metrics import accuracy, ari
from ips2.models import (
    ClusterConfig,
    ClusteringResult,
    Dataset,
    Diagnostics,
    EmbedMode,
    HighOrderSimilarity,
    SimilarityMatrix,
)
from ips2.synthgen import gen_usdata1


def _sse(points: np.ndarray, labels: np.ndarray) -> float:
    total = 0.0
    for g in np.unique(labels):
        members = points[labels == g]
        total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


def _best_two_partition(points: np.ndarray) -> float:
    m = points.shape[0]
    best = np.inf
    for bits in product([0, 1], repeat=m - 1):
        labels = np.array((0, *bits))
        if labels.min() == labels.max():
            continue
        best = min(best, _sse(points, labels))
    return best


def test_fuse_examples() -> None:
    s = SimilarityMatrix(np.array([[1.0, 0.2], [0.2, 1.0]]))
    v = SimilarityMatrix(np.array([[1.0, 0.8], [0.8, 1.0]]))

    np.testing.assert_allclose(fuse(s, v).values, [[1.0, 0.5], [0.5, 1.0]])
    np.testing.assert_array_equal(fuse(s, s).values, s.values)
    np.testing.assert_array_equal(fuse(s, SimilarityMatrix(np.zeros((2, 2)))).values, s.values / 2)


def test_fuse_size_mismatch() -> None:
    with pytest.raises(SizeError):
        fuse(SimilarityMatrix(np.eye(2)), SimilarityMatrix(np.eye(3)))


def test_kmeans_saturated() -> None:
    points = np.array([[0.0], [1.0], [3.0], [7.0]])

    result = kmeans(points, 4, ClusterConfig(c=4, restarts=2))

    assert sorted(result.labels.tolist()) == [0, 1, 2, 3]
    assert result.objective == 0.0


def test_kmeans_separated_line() -> None:
    result = kmeans(np.array([[0.0], [0.1], [10.0], [10.1]]), 2, ClusterConfig())

    labels = result.labels
    assert labels[0] == labels[1] != labels[2] == labels[3]
    assert result.objective == pytest.approx(0.01)


def test_kmeans_finds_the_exhaustive_optimum(rng: np.random.Generator) -> None:
    cfg = ClusterConfig(restarts=10)
    for _ in range(10):
        m = int(rng.integers(4, 9))
        centers = np.array([[0.0, 0.0], [6.0, 6.0]])
        points = centers[np.arange(m) % 2] + rng.normal(scale=0.5, size=(m, 2))

        result = kmeans(points, 2, cfg)

        assert result.objective == pytest.approx(_best_two_partition(points), rel=1e-9)
        assert result.objective == pytest.approx(_sse(points, result.labels), rel=1e-9)


def test_kmeans_objective_never_increases(rng: np.random.Generator) -> None:
    points = rng.normal(size=(60, 3))

    result = kmeans(points, 4, ClusterConfig(c=4, restarts=1))

    history = result.diagnostics.objective_history
    assert history
    assert all(later <= earlier + 1e-12 for earlier, later in zip(history, history[1:]))
    assert history[-1] == result.objective


def test_kmeans_refills_empty_clusters() -> None:
    points = np.array([[0.0], [0.0], [0.0], [0.0], [5.0]])

    result = kmeans(points, 3, ClusterConfig(c=3, restarts=4))

    assert np.unique(result.labels).size == 3


def test_kmeans_is_seeded(rng: np.random.Generator) -> None:
    points = rng.normal(size=(30, 2))
    cfg = ClusterConfig(c=3, restarts=2, seed=8)

    np.testing.assert_array_equal(kmeans(points, 3, cfg).labels, kmeans(points, 3, cfg).labels)


def test_kmeans_needs_enough_points() -> None:
    with pytest.raises(SizeError):
        kmeans(np.zeros((2, 1)), 3, ClusterConfig(c=3))


def test_embedding_of_block_similarity() -> None:
    a = scipy.linalg.block_diag(np.full((3, 3), 0.9), np.full((4, 4), 0.7))

    embedding = spectral_embed(a, 2, ClusterConfig())

    rows = {tuple(np.round(row, 9)) for row in embedding}
    assert len(rows) == 2
    np.testing.assert_allclose(embedding[:3], np.tile(embedding[0], (3, 1)))
    np.testing.assert_allclose(embedding[3:], np.tile(embedding[3], (4, 1)))


def test_embedding_of_identity_is_axis_vectors_and_flagged() -> None:
    diagnostics = Diagnostics()

    embedding = spectral_embed(np.eye(4), 2, ClusterConfig(), diagnostics)

    np.testing.assert_array_equal(embedding, np.eye(4)[:, :2])
    assert "degenerate_embedding" in diagnostics.flags


def test_embedding_rows_have_unit_norm(random_similarity: Callable[[int], np.ndarray]) -> None:
    diagnostics = Diagnostics()

    embedding = spectral_embed(random_similarity(12), 3, ClusterConfig(c=3), diagnostics)

    np.testing.assert_allclose(np.linalg.norm(embedding, axis=1), 1.0, atol=1e-12)
    assert len(diagnostics.eig_residuals["embed"]) == 3
    assert "degenerate_embedding" not in diagnostics.flags


def test_embedding_is_scale_invariant(random_similarity: Callable[[int], np.ndarray]) -> None:
    a = random_similarity(10)

    plain = spectral_embed(a, 2, ClusterConfig())
    scaled = spectral_embed(4.0 * a, 2, ClusterConfig())

    np.testing.assert_allclose(plain, scaled, atol=1e-10)


@pytest.mark.parametrize("pipeline", [run_sc, run_ppc, run_ips2])
def test_pipelines_separate_far_blobs(
    pipeline: Callable[[Dataset, ClusterConfig], object],
    two_blobs: Dataset,
    fast_config: ClusterConfig,
) -> None:
    result = pipeline(two_blobs, fast_config)

    assert accuracy(result.labels, two_blobs.labels) == 1.0
    assert result.m == two_blobs.m


@pytest.mark.parametrize("pipeline", [run_sc, run_ppc, run_ips2])
def test_pipelines_are_deterministic(
    pipeline: Callable[[Dataset, ClusterConfig], object],
    two_blobs: Dataset,
    fast_config: ClusterConfig,
) -> None:
    first = pipeline(two_blobs, fast_config)
    second = pipeline(two_blobs, fast_config)

    np.testing.assert_array_equal(first.labels, second.labels)
    assert first.objective == second.objective


@pytest.mark.parametrize("pipeline", [run_sc, run_ppc, run_ips2])
def test_pipelines_follow_a_permutation_of_the_samples(
    pipeline: Callable[[Dataset, ClusterConfig], ClusteringResult],
) -> None:
    dataset = gen_usdata1(dim=50, seed=2)
    order = np.random.default_rng(9).permutation(dataset.m)
    cfg = ClusterConfig(c=3, seed=1)

    labels = pipeline(dataset, cfg).labels
    permuted_labels = pipeline(dataset.permuted(order), cfg).labels

    assert ari(permuted_labels, labels[order]) == pytest.approx(1.0)


@pytest.mark.parametrize("pipeline", [run_sc, run_ppc, run_ips2])
def test_pipelines_need_enough_samples(
    pipeline: Callable[[Dataset, ClusterConfig], object],
) -> None:
    with pytest.raises(SizeError):
        pipeline(Dataset(np.zeros((2, 3))), ClusterConfig(c=3))


def test_ips2_rows_mode(two_blobs: Dataset, fast_config: ClusterConfig) -> None:
    cfg = fast_config.model_copy(update={"embed_mode": EmbedMode.ROWS})

    result = run_ips2(two_blobs, cfg)

    assert accuracy(result.labels, two_blobs.labels) == 1.0


def test_ips2_with_degenerate_high_order_matches_sc(
    two_blobs: Dataset, fast_config: ClusterConfig, mocker: MockerFixture
) -> None:
    m = two_blobs.m
    degenerate = HighOrderSimilarity(np.zeros((m, m)), degenerate=True)
    mocker.patch("ips2.cluster.high_order_similarity", return_value=degenerate)

    fused = run_ips2(two_blobs, fast_config)

    assert "degenerate_high_order" in fused.diagnostics.flags
    np.testing.assert_array_equal(fused.labels, run_sc(two_blobs, fast_config).labels)


def test_small_datasets_cap_k(fast_config: ClusterConfig) -> None:
    dataset = Dataset(np.array([[0.0], [0.2], [5.0], [5.3], [5.1]]), np.array([0, 0, 1, 1, 1]))

    result = run_ppc(dataset, fast_config)

    assert result.m == 5
    assert "tensor" in result.diagnostics.eig_residuals


def test_pipeline_registry() -> None:
    assert set(PIPELINES) == {"sc", "ppc", "ips2"}
    assert PIPELINES["ips2"] is run_ips2
