import numpy as np
import pytest

from ips2.cluster import compute_high_order
from ips2.errors import SizeError
from ips2.highorder import canonicalize, fold_eigenvector, high_order_similarity
from ips2.models import ClusterConfig, EigenPairs
from ips2.pairwise import pairwise_distances
from ips2.synthgen import gen_two_cluster, gen_usdata1
from ips2.tensorsim import unfold_index


def _pairs(*vectors: np.ndarray) -> EigenPairs:
    stacked = np.column_stack(vectors)
    count = stacked.shape[1]
    return EigenPairs(values=np.ones(count), vectors=stacked, residuals=np.zeros(count))


def test_fold_of_kronecker_vector_is_outer_product() -> None:
    v = np.array([1.0, 2.0])

    np.testing.assert_array_equal(fold_eigenvector(np.kron(v, v), 2), [[1, 2], [2, 4]])


def test_fold_of_single_sample() -> None:
    np.testing.assert_array_equal(fold_eigenvector(np.array([3.5]), 1), [[3.5]])


def test_fold_follows_unfold_order(rng: np.random.Generator) -> None:
    m = 4
    v_hat = rng.normal(size=m * m)

    folded = fold_eigenvector(v_hat, m)

    for i in range(1, m + 1):
        for j in range(1, m + 1):
            assert folded[i - 1, j - 1] == v_hat[unfold_index(i, j, m) - 1]
    np.testing.assert_array_equal(folded.ravel(order="F"), v_hat)


def test_fold_length_mismatch() -> None:
    with pytest.raises(SizeError):
        fold_eigenvector(np.ones(5), 2)


def test_canonicalize_examples() -> None:
    negative = -np.array([[1.0, 2.0], [2.0, 3.0]])
    symmetric = np.array([[1.0, 0.5], [0.5, 0.2]])

    np.testing.assert_array_equal(canonicalize(negative), -negative)
    np.testing.assert_array_equal(canonicalize(symmetric), symmetric)
    np.testing.assert_array_equal(canonicalize(np.array([[0.0, 1.0], [0.0, 0.0]])), [[0, 0.5], [0.5, 0]])


def test_constant_fold_is_degenerate() -> None:
    v = np.full(3, 1 / np.sqrt(3))

    similarity = high_order_similarity(_pairs(np.kron(v, v)), 3, 1)

    assert similarity.degenerate
    np.testing.assert_array_equal(similarity.values, np.zeros((3, 3)))


def test_outer_product_is_min_max_scaled() -> None:
    v = np.array([0.8, 0.6])

    similarity = high_order_similarity(_pairs(np.kron(v, v)), 2, 1)

    assert not similarity.degenerate
    assert similarity.values[0, 0] == 1.0
    assert similarity.values[1, 1] == 0.0
    assert similarity.values[0, 1] == pytest.approx((0.48 - 0.36) / (0.64 - 0.36))


def test_folds_are_averaged() -> None:
    first = np.array([1.0, 0.0, 0.0, 0.0])
    second = np.array([0.0, 0.0, 0.0, -1.0])

    similarity = high_order_similarity(_pairs(first, second), 2, 2)

    # both folds canonicalize to a nonnegative diagonal entry
    np.testing.assert_array_equal(similarity.values, [[1, 0], [0, 1]])


def test_sign_of_input_vectors_does_not_matter(rng: np.random.Generator) -> None:
    vectors = rng.normal(size=(9, 2))

    plain = high_order_similarity(_pairs(vectors[:, 0], vectors[:, 1]), 3, 2)
    flipped = high_order_similarity(_pairs(-vectors[:, 0], vectors[:, 1]), 3, 2)

    np.testing.assert_array_equal(plain.values, flipped.values)
    np.testing.assert_array_equal(plain.values, plain.values.T)
    assert plain.values.min() == 0.0 and plain.values.max() == 1.0


def test_too_few_vectors() -> None:
    with pytest.raises(SizeError):
        high_order_similarity(_pairs(np.ones(4)), 2, 2)
    with pytest.raises(SizeError):
        high_order_similarity(_pairs(np.ones(9)), 2, 1)


def test_two_cluster_data_gives_block_structure() -> None:
    dataset = gen_two_cluster(seed=4)
    labels = dataset.labels
    same = labels[:, None] == labels[None, :]

    stage = compute_high_order(pairwise_distances(dataset), ClusterConfig(c=2, k=10))

    values = stage.similarity.values
    assert not stage.similarity.degenerate
    assert values[same].mean() > values[~same].mean()


def test_high_order_similarity_follows_a_permutation_of_the_samples() -> None:
    dataset = gen_usdata1(dim=50, seed=2)
    order = np.random.default_rng(9).permutation(dataset.m)
    cfg = ClusterConfig(c=3, k=10)

    v = compute_high_order(pairwise_distances(dataset), cfg).similarity.values
    v_permuted = compute_high_order(pairwise_distances(dataset.permuted(order)), cfg).similarity.values

    np.testing.assert_allclose(v_permuted, v[np.ix_(order, order)], rtol=0, atol=1e-6)
