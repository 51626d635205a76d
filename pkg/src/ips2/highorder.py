"""High-order similarity folded from eigenvectors of the unfolded tensor Laplacian."""

from __future__ import annotations

import logging

import numpy as np
from opentelemetry import trace

from ips2.errors import SizeError
from ips2.models.matrices import EigenPairs, HighOrderSimilarity

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

_CONSTANT_SPAN = 1e-12


def fold_eigenvector(v_hat: np.ndarray, m: int) -> np.ndarray:
    """Reshape a length-``m²`` vector so that ``V[i, j] = v_hat[unfold(i, j)]``."""
    v_hat = np.asarray(v_hat, dtype=float)
    if v_hat.shape != (m * m,):
        raise SizeError(f"expected a vector of length {m * m}, got shape {v_hat.shape}")
    return v_hat.reshape((m, m), order="F")


def canonicalize(vi: np.ndarray) -> np.ndarray:
    """Make the first largest-magnitude entry (row-major) nonnegative, then symmetrize."""
    pivot = np.unravel_index(int(np.argmax(np.abs(vi))), vi.shape)
    if vi[pivot] < 0:
        vi = -vi
    return 0.5 * (vi + vi.T)


def high_order_similarity(pairs: EigenPairs, m: int, c: int) -> HighOrderSimilarity:
    """Average the canonicalized folds of the top ``c`` eigenvectors, scaled to [0, 1].

    A constant average has no structure to scale; it is returned as all zeros and
    marked ``degenerate``.

    Raises:
        SizeError: If there are fewer than ``c`` vectors or they are not length ``m²``.
    """
    if pairs.count < c:
        raise SizeError(f"need {c} eigenvectors, got {pairs.count}")
    if pairs.vectors.shape[0] != m * m:
        raise SizeError(
            f"eigenvectors have length {pairs.vectors.shape[0]}, expected {m * m}"
        )

    with tracer.start_as_current_span("ips2.high_order", attributes={"m": m, "c": c}):
        folds = [canonicalize(fold_eigenvector(pairs.vectors[:, i], m)) for i in range(c)]
        averaged = np.mean(folds, axis=0)
        low, high = float(averaged.min()), float(averaged.max())
        magnitude = max(abs(low), abs(high), np.finfo(float).tiny)
        if high - low <= _CONSTANT_SPAN * magnitude:
            logger.warning("High-order similarity is constant; using all zeros")
            return HighOrderSimilarity(np.zeros((m, m)), degenerate=True)
        return HighOrderSimilarity((averaged - low) / (high - low))
