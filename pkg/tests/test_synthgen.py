import numpy as np
import pytest

from ips2.errors import ParameterError, SizeError, UsageError
from ips2.models import Dataset, NoiseKind
from ips2.synthgen import (
    USDATA2_DIM,
    add_noise,
    draw_cluster,
    gen_complementarity,
    gen_gaussian_clusters,
    gen_two_cluster,
    gen_usdata1,
    gen_usdata2,
    generate,
    make_noise_model,
)


def _zeros(m: int, n: int) -> Dataset:
    return Dataset(np.zeros((m, n)))


def test_cluster_means_match_targets() -> None:
    means = [0.1, 0.5, 1.0]

    dataset = gen_gaussian_clusters([20, 20, 20], means, 0.5, 500, seed=1)

    bound = 4 * 0.5 / np.sqrt(20 * 500)
    for label, mean in enumerate(means):
        block = dataset.samples[dataset.labels == label]
        assert abs(block.mean() - mean) < bound
    assert dataset.metadata["sizes"] == [20, 20, 20]


def test_single_draw_with_tiny_spread_sits_on_the_mean() -> None:
    row = draw_cluster(1, 3.0, 1e-9, 1, seed=5)

    assert row.shape == (1, 1)
    assert row[0, 0] == pytest.approx(3.0, abs=1e-7)


def test_generation_is_deterministic() -> None:
    first = gen_gaussian_clusters([5, 7], [0.0, 1.0], 0.3, 4, seed=9)
    second = gen_gaussian_clusters([5, 7], [0.0, 1.0], 0.3, 4, seed=9)
    other = gen_gaussian_clusters([5, 7], [0.0, 1.0], 0.3, 4, seed=10)

    np.testing.assert_array_equal(first.samples, second.samples)
    np.testing.assert_array_equal(first.labels, second.labels)
    assert not np.array_equal(first.samples, other.samples)


def test_cluster_argument_checks() -> None:
    with pytest.raises(SizeError):
        gen_gaussian_clusters([10, 10], [0.0], 1.0, 3, seed=0)
    with pytest.raises(ParameterError):
        gen_gaussian_clusters([10, 10], [0.0, 1.0], 0.0, 3, seed=0)
    with pytest.raises(SizeError):
        gen_gaussian_clusters([1], [0.0], 1.0, 3, seed=0)


def test_usdata1_shape_and_labels() -> None:
    dataset = gen_usdata1(dim=500, seed=1)

    assert (dataset.m, dataset.n) == (60, 500)
    np.testing.assert_array_equal(dataset.labels, np.repeat([0, 1, 2], 20))
    assert dataset.metadata["noise"]["std"] == 0.5


def test_usdata1_in_one_dimension() -> None:
    dataset = gen_usdata1(dim=1, seed=1)

    assert (dataset.m, dataset.n) == (60, 1)
    np.testing.assert_array_equal(dataset.samples, gen_usdata1(dim=1, seed=1).samples)


def test_usdata2_sizes() -> None:
    assert gen_usdata2(10, seed=1).m == 50
    assert gen_usdata2(10, seed=1).n == USDATA2_DIM
    assert gen_usdata2(235, seed=1, dim=20).m == 275


def test_usdata2_grows_without_changing_earlier_samples() -> None:
    small = gen_usdata2(10, seed=3, dim=30)
    large = gen_usdata2(20, seed=3, dim=30)

    np.testing.assert_array_equal(small.samples, large.samples[:50])
    np.testing.assert_array_equal(
        small.samples, gen_usdata2(10, seed=3, dim=30).samples
    )


def test_usdata2_needs_a_third_cluster() -> None:
    with pytest.raises(SizeError):
        gen_usdata2(0, seed=1)


def test_named_variants() -> None:
    complementarity = gen_complementarity(seed=2, dim=10)
    two_cluster = gen_two_cluster(seed=2, dim=10)

    assert np.bincount(complementarity.labels).tolist() == [17, 17, 16]
    assert np.bincount(two_cluster.labels).tolist() == [20, 20]


def test_uniform_noise_support() -> None:
    noisy = add_noise(_zeros(100, 50), make_noise_model("uniform"), seed=4)

    assert np.all(noisy.samples > 0.0)
    assert np.all(noisy.samples < 1.0)


def test_gaussian_noise_moments() -> None:
    noisy = add_noise(_zeros(100, 1000), make_noise_model(NoiseKind.GAUSSIAN, std=0.5), seed=4)

    assert abs(noisy.samples.mean()) < 0.01
    assert abs(noisy.samples.std() - 0.5) < 0.01


def test_rayleigh_noise_mean() -> None:
    noisy = add_noise(_zeros(100, 1000), make_noise_model("rayleigh", scale=0.5), seed=4)

    assert np.all(noisy.samples > 0.0)
    expected = 0.5 * np.sqrt(np.pi / 2)
    assert abs(noisy.samples.mean() - expected) < 0.02 * expected


def test_gamma_noise_defaults() -> None:
    model = make_noise_model("gamma")
    noisy = add_noise(_zeros(100, 1000), model, seed=4)

    assert model.effective_scale == 10.0
    assert abs(noisy.samples.mean() - 50.0) < 0.5


def test_noise_keeps_labels_and_is_per_sample(two_blobs: Dataset) -> None:
    model = make_noise_model("gaussian")

    noisy = add_noise(two_blobs, model, seed=1)
    head = add_noise(Dataset(two_blobs.samples[:10]), model, seed=1)

    np.testing.assert_array_equal(noisy.labels, two_blobs.labels)
    np.testing.assert_array_equal(noisy.samples[:10], head.samples)
    assert noisy.metadata["noise"]["kind"] == "gaussian"


def test_invalid_noise_parameters() -> None:
    with pytest.raises(ParameterError):
        make_noise_model("gaussian", std=0.0)
    with pytest.raises(ParameterError):
        make_noise_model("rayleigh", scale=-1.0)
    with pytest.raises(ParameterError):
        make_noise_model("gamma", shape=0.0)
    with pytest.raises(ParameterError):
        make_noise_model("uniform", low=1.0, high=1.0)


def test_generate_by_name() -> None:
    dataset = generate("usdata1", seed=1, dim=3)

    assert dataset.m == 60
    assert dataset.metadata["generator"] == "usdata1"


def test_generate_rejects_unknown_names_and_parameters() -> None:
    with pytest.raises(UsageError):
        generate("nope", seed=1)
    with pytest.raises(UsageError):
        generate("usdata1", seed=1, dim=3, colour="red")
