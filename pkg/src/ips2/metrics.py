"""External clustering quality scores against ground-truth labels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix, pair_confusion_matrix

from ips2.errors import DomainError, SizeError

METRIC_NAMES = ("acc", "ari", "f_score", "nmi", "purity")


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Co-occurrence counts of true classes (rows) and predicted clusters (columns)."""

    counts: np.ndarray

    @property
    def row_sums(self) -> np.ndarray:
        """Samples per true class."""
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        """Samples per predicted cluster."""
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        """Number of samples ``m``."""
        return int(self.counts.sum())

    def padded(self) -> np.ndarray:
        """Counts zero-padded to a ``max(r, s)`` square."""
        size = max(self.counts.shape)
        square = np.zeros((size, size), dtype=self.counts.dtype)
        square[: self.counts.shape[0], : self.counts.shape[1]] = self.counts
        return square


def _check_pair(pred: np.ndarray, truth: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.size != truth.size:
        raise SizeError(
            f"predicted labels have length {pred.size}, ground truth {truth.size}"
        )
    if pred.size == 0:
        raise SizeError("cannot score an empty labeling")
    return pred, truth


def contingency_table(pred: np.ndarray, truth: np.ndarray) -> ContingencyTable:
    """Build the class-by-cluster contingency table."""
    pred, truth = _check_pair(pred, truth)
    return ContingencyTable(np.asarray(contingency_matrix(truth, pred), dtype=np.int64))


def hungarian(cost: np.ndarray) -> np.ndarray:
    """Minimum-cost perfect matching; ``result[row]`` is the column matched to ``row``.

    Raises:
        SizeError: If ``cost`` is not square.
        DomainError: If ``cost`` has non-finite entries.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise SizeError(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise DomainError("cost matrix has non-finite entries")
    rows, cols = linear_sum_assignment(cost)
    assignment = np.empty(cost.shape[0], dtype=np.int64)
    assignment[rows] = cols
    return assignment


def accuracy(pred: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of samples correct under the best one-to-one cluster-to-class map."""
    table = contingency_table(pred, truth)
    square = table.padded()
    matched = hungarian(-square)
    return float(square[np.arange(square.shape[0]), matched].sum()) / table.total


def ari(pred: np.ndarray, truth: np.ndarray) -> float:
    """Adjusted Rand index."""
    pred, truth = _check_pair(pred, truth)
    return float(adjusted_rand_score(truth, pred))


def f_score_pairs(pred: np.ndarray, truth: np.ndarray) -> float:
    """Harmonic mean of pairwise precision and recall over same-cluster sample pairs.

    Precision is 0 when no two samples share a predicted cluster and recall is 0
    when no two share a class; F is 0 whenever either is.
    """
    pred, truth = _check_pair(pred, truth)
    confusion = pair_confusion_matrix(truth, pred).astype(np.int64)
    true_pos = int(confusion[1, 1])
    false_pos = int(confusion[0, 1])
    false_neg = int(confusion[1, 0])
    if true_pos == 0:
        return 0.0
    return 2.0 * true_pos / (2.0 * true_pos + false_pos + false_neg)


def nmi(pred: np.ndarray, truth: np.ndarray) -> float:
    """Mutual information over the geometric mean of the two entropies.

    Defined as 0 when either labeling has a single group.
    """
    pred, truth = _check_pair(pred, truth)
    if np.unique(pred).size < 2 or np.unique(truth).size < 2:
        return 0.0
    score = normalized_mutual_info_score(truth, pred, average_method="geometric")
    return float(np.clip(score, 0.0, 1.0))


def purity(pred: np.ndarray, truth: np.ndarray) -> float:
    """Share of samples that belong to their cluster's majority class."""
    table = contingency_table(pred, truth)
    return float(table.counts.max(axis=0).sum()) / table.total


def evaluate(pred: np.ndarray, truth: np.ndarray) -> dict[str, float]:
    """Every metric in ``METRIC_NAMES``, keyed by name."""
    return {
        "acc": accuracy(pred, truth),
        "ari": ari(pred, truth),
        "f_score": f_score_pairs(pred, truth),
        "nmi": nmi(pred, truth),
        "purity": purity(pred, truth),
    }
