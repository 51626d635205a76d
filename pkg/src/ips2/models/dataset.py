"""Dataset value type."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ips2.errors import SizeError


@dataclass(frozen=True, eq=False)
class Dataset:
    """Samples as rows, features as columns, with optional ground-truth labels."""

    samples: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate shapes and freeze the arrays.

        Raises:
            SizeError: If there are fewer than two samples, no features, non-finite
                values, or a label vector of the wrong length.
        """
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 2:
            raise SizeError(f"samples must be a 2-D matrix, got {samples.ndim}-D")
        m, n = samples.shape
        if m < 2:
            raise SizeError(f"a dataset needs at least 2 samples, got {m}")
        if n < 1:
            raise SizeError("a dataset needs at least 1 feature")
        if not np.all(np.isfinite(samples)):
            raise SizeError("samples contain non-finite values")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

        if self.labels is not None:
            labels = np.array(self.labels, dtype=np.int64)
            if labels.shape != (m,):
                raise SizeError(f"expected {m} labels, got {labels.shape[0]}")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        """Number of samples."""
        return int(self.samples.shape[0])

    @property
    def n(self) -> int:
        """Number of features."""
        return int(self.samples.shape[1])

    @property
    def n_classes(self) -> int:
        """Number of distinct ground-truth classes (0 when unlabeled)."""
        if self.labels is None:
            return 0
        return int(np.unique(self.labels).size)

    def permuted(self, order: np.ndarray) -> Dataset:
        """Return the dataset with samples (and labels) reordered by ``order``."""
        labels = None if self.labels is None else self.labels[order]
        return Dataset(self.samples[order], labels, self.name, dict(self.metadata))
