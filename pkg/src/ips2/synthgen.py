"""Seeded synthetic datasets and additive noise models.

Every sample ``i`` draws from its own Philox stream keyed by ``(seed, purpose, i)``,
so a sample's values do not depend on how many samples come before it or on the
order they are generated in.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from pydantic import ValidationError

from ips2.errors import ParameterError, SizeError, UsageError
from ips2.models.config import NoiseKind, NoiseModel
from ips2.models.dataset import Dataset
from ips2.seeding import Stream, rng_for

logger = logging.getLogger(__name__)

US_MEANS = (0.1, 0.5, 1.0)
US_STD = 0.5
US_CLUSTER_SIZE = 20
USDATA2_DIM = 2360


def draw_cluster(
    size: int, mean: float, std: float, dim: int, seed: int, offset: int = 0
) -> np.ndarray:
    """``size`` rows of i.i.d. Normal(mean, std²) features, one stream per row.

    Rows use stream indices ``offset .. offset + size - 1``.
    """
    if std <= 0:
        raise ParameterError(f"cluster std must be positive, got {std}")
    if size < 0 or dim < 1:
        raise SizeError(f"invalid cluster shape: size={size}, dim={dim}")
    rows = [
        rng_for(seed, Stream.CLUSTER_DRAW, offset + i).normal(mean, std, dim)
        for i in range(size)
    ]
    return np.vstack(rows) if rows else np.empty((0, dim))


def gen_gaussian_clusters(
    sizes: Sequence[int],
    means: Sequence[float],
    std: float,
    dim: int,
    seed: int,
    name: str = "gaussian",
) -> Dataset:
    """Clusters of isotropic Gaussian samples, cluster ``g`` centred at ``means[g]``.

    Raises:
        SizeError: If ``sizes`` and ``means`` differ in length, or fewer than two
            samples are requested in total.
        ParameterError: If ``std`` is not positive.
    """
    if len(sizes) != len(means) or not sizes:
        raise SizeError(f"got {len(sizes)} cluster sizes for {len(means)} means")
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
    blocks = [
        draw_cluster(int(size), float(mean), std, dim, seed, int(offset))
        for size, mean, offset in zip(sizes, means, offsets)
    ]
    labels = np.repeat(np.arange(len(sizes)), sizes)
    metadata = {
        "generator": name,
        "sizes": [int(s) for s in sizes],
        "means": [float(mu) for mu in means],
        "std": float(std),
        "dim": int(dim),
        "seed": int(seed),
    }
    return Dataset(np.vstack(blocks), labels, name, metadata)


def make_noise_model(kind: NoiseKind | str, **params: float) -> NoiseModel:
    """Build a validated ``NoiseModel``.

    Raises:
        ParameterError: If the parameters are invalid for ``kind``.
    """
    try:
        return NoiseModel(kind=kind, **params)
    except ValidationError as e:
        raise ParameterError(f"invalid {kind} noise parameters", str(e)) from e


def _draw_noise(model: NoiseModel, rng: np.random.Generator, n: int) -> np.ndarray:
    if model.kind is NoiseKind.UNIFORM:
        return rng.uniform(np.nextafter(model.low, model.high), model.high, n)
    if model.kind is NoiseKind.GAUSSIAN:
        return rng.normal(model.mean, model.std, n)
    if model.kind is NoiseKind.RAYLEIGH:
        return rng.rayleigh(model.effective_scale, n)
    return rng.gamma(model.shape, model.effective_scale, n)


def add_noise(
    dataset: Dataset, model: NoiseModel, seed: int, stream: Stream = Stream.NOISE
) -> Dataset:
    """Add i.i.d. noise from ``model`` to every feature; labels are kept.

    Noise layered on top of a generator's own noise must use another ``stream``
    so the two draws stay independent for the same seed.
    """
    noise = np.vstack(
        [_draw_noise(model, rng_for(seed, stream, i), dataset.n) for i in range(dataset.m)]
    )
    logger.debug(f"Added {model.kind.value} noise to {dataset.name} ({dataset.m}x{dataset.n})")
    metadata = {**dataset.metadata, "noise": model.model_dump(mode="json")}
    return Dataset(dataset.samples + noise, dataset.labels, dataset.name, metadata)


def _with_white_noise(dataset: Dataset, noise_std: float, seed: int) -> Dataset:
    if noise_std == 0:
        return dataset
    return add_noise(dataset, make_noise_model(NoiseKind.GAUSSIAN, std=noise_std), seed)


def gen_usdata1(dim: int, seed: int, noise_std: float = US_STD) -> Dataset:
    """Three 20-sample clusters (means 0.1, 0.5, 1; std 0.5) plus white noise.

    ``noise_std=0`` leaves the clusters uncontaminated so another noise model can be
    applied instead.
    """
    clean = gen_gaussian_clusters(
        [US_CLUSTER_SIZE] * 3, US_MEANS, US_STD, dim, seed, name="usdata1"
    )
    return _with_white_noise(clean, noise_std, seed)


def gen_usdata2(
    n3: int, seed: int, dim: int = USDATA2_DIM, noise_std: float = US_STD
) -> Dataset:
    """USdata1's clusters with 20, 20 and ``n3`` samples in a fixed dimension."""
    if n3 < 1:
        raise SizeError(f"cluster 3 needs at least one sample, got {n3}")
    clean = gen_gaussian_clusters(
        [US_CLUSTER_SIZE, US_CLUSTER_SIZE, n3], US_MEANS, US_STD, dim, seed, name="usdata2"
    )
    return _with_white_noise(clean, noise_std, seed)


def gen_complementarity(seed: int, dim: int = 500) -> Dataset:
    """50 samples in three clusters (17/17/16) with means 1, 2.5 and 5, std 0.5."""
    return gen_gaussian_clusters(
        [17, 17, 16], [1.0, 2.5, 5.0], 0.5, dim, seed, name="complementarity"
    )


def gen_two_cluster(seed: int, dim: int = 500) -> Dataset:
    """Two 20-sample clusters with means 1 and 2.5, std 0.5."""
    return gen_gaussian_clusters([20, 20], [1.0, 2.5], 0.5, dim, seed, name="two_cluster")


GENERATORS: dict[str, Callable[..., Dataset]] = {
    "usdata1": gen_usdata1,
    "usdata2": gen_usdata2,
    "complementarity": gen_complementarity,
    "two_cluster": gen_two_cluster,
    "gaussian": gen_gaussian_clusters,
}


def generate(name: str, seed: int, **params: Any) -> Dataset:
    """Run the generator registered as ``name``.

    Raises:
        UsageError: If no generator has that name or a parameter is not accepted.
    """
    generator = GENERATORS.get(name)
    if generator is None:
        raise UsageError(
            f"unknown generator {name!r}", f"choose one of {', '.join(GENERATORS)}"
        )
    try:
        return generator(seed=seed, **params)
    except TypeError as e:
        raise UsageError(f"bad parameters for generator {name!r}", str(e)) from e
