"""Shared pytest fixtures for all tests."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import pytest

from ips2.models import ClusterConfig, Dataset
from ips2.synthgen import gen_gaussian_clusters


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def two_blobs() -> Dataset:
    """Two 20-sample Gaussian blobs in 5 dimensions, about 224 apart."""
    return gen_gaussian_clusters([20, 20], [0.0, 100.0], 1.0, 5, seed=7, name="blobs")


@pytest.fixture
def fast_config() -> ClusterConfig:
    return ClusterConfig(c=2, k=10, restarts=3, seed=3)


@pytest.fixture
def random_similarity(rng: np.random.Generator) -> Callable[[int], np.ndarray]:
    """Factory of symmetric, strictly positive m×m matrices with a unit diagonal."""

    def make(m: int) -> np.ndarray:
        upper = rng.uniform(0.05, 1.0, size=(m, m))
        values = np.triu(upper, 1)
        values = values + values.T
        np.fill_diagonal(values, 1.0)
        return values

    return make
