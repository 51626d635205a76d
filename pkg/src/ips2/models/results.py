"""Clustering outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Diagnostics:
    """Numerical side information gathered while a pipeline runs."""

    eig_residuals: dict[str, list[float]] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    objective_history: list[float] = field(default_factory=list)

    def flag(self, name: str) -> None:
        """Record a degeneracy flag once."""
        if name not in self.flags:
            self.flags.append(name)


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    """Cluster assignment for every sample plus the k-means objective."""

    labels: np.ndarray
    objective: float
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    @property
    def m(self) -> int:
        """Number of labelled samples."""
        return int(self.labels.size)
