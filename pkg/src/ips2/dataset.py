"""CSV ingestion, export and standardization of datasets."""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np

from ips2.errors import ParameterError, ParseError
from ips2.models.config import Standardization
from ips2.models.dataset import Dataset

logger = logging.getLogger(__name__)

LABEL_HEADER = "label"
_ZERO_STD = 1e-12


def _read_rows(path: Path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return [row for row in csv.reader(handle) if row]


def _resolve_label_column(
    label_column: str | int | None, header: list[str] | None, width: int
) -> int | None:
    if label_column is None:
        return None
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None:
            raise ParameterError(
                f"label column {label_column!r} selected by name but the file has no header"
            )
        names = [name.strip() for name in header]
        if label_column not in names:
            raise ParameterError(f"no column named {label_column!r} in header {names}")
        return names.index(label_column)
    index = int(label_column)
    if not 0 <= index < width:
        raise ParameterError(f"label column {index} outside 0..{width - 1}")
    return index


def canonical_labels(raw: list[str]) -> np.ndarray:
    """Map label strings to 0..c-1 in order of first appearance."""
    ids: dict[str, int] = {}
    return np.array([ids.setdefault(value, len(ids)) for value in raw], dtype=np.int64)


def load_csv(
    path: Path | str,
    label_column: str | int | None = None,
    has_header: bool = False,
) -> Dataset:
    """Load a dataset from a comma-separated file.

    Rows are samples. Every non-label column must parse as a finite real. Row
    indices in errors count physical (non-blank) rows from 0, header included.

    Args:
        path: CSV file.
        label_column: Column holding ground-truth labels, by header name or 0-based
            index. ``None`` loads an unlabeled dataset.
        has_header: Whether the first row holds column names.

    Raises:
        ParseError: On ragged rows or non-numeric feature cells.
        ParameterError: If the label column cannot be resolved.
        SizeError: If fewer than two samples remain.
    """
    path = Path(path)
    rows = _read_rows(path)
    header = rows[0] if has_header and rows else None
    first_data = 1 if has_header else 0
    if not rows:
        raise ParseError(f"{path} is empty", row=0)

    width = len(rows[0])
    for index, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(
                f"row has {len(row)} columns, expected {width}", row=index
            )

    label_index = _resolve_label_column(label_column, header, width)
    feature_columns = [col for col in range(width) if col != label_index]

    samples = np.empty((len(rows) - first_data, len(feature_columns)))
    for out_row, index in enumerate(range(first_data, len(rows))):
        row = rows[index]
        for out_col, col in enumerate(feature_columns):
            cell = row[col].strip()
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric feature {cell!r}", row=index, col=col) from None
            if not math.isfinite(value):
                raise ParseError(f"non-finite feature {cell!r}", row=index, col=col)
            samples[out_row, out_col] = value

    labels = None
    if label_index is not None:
        labels = canonical_labels([rows[i][label_index].strip() for i in range(first_data, len(rows))])

    dataset = Dataset(samples, labels, name=path.stem, metadata={"source": str(path)})
    logger.debug(f"Loaded {path}: m={dataset.m}, n={dataset.n}, classes={dataset.n_classes}")
    return dataset


def write_csv(dataset: Dataset, path: Path | str) -> None:
    """Write a dataset with a header row, ``%.17g`` reals and a trailing label column."""
    header = [f"f{j}" for j in range(dataset.n)]
    if dataset.labels is not None:
        header.append(LABEL_HEADER)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for i, sample in enumerate(dataset.samples.tolist()):
            row = [f"{value:.17g}" for value in sample]
            if dataset.labels is not None:
                row.append(str(int(dataset.labels[i])))
            writer.writerow(row)


def standardize(dataset: Dataset, mode: Standardization | str = Standardization.NONE) -> Dataset:
    """Return the dataset with per-column z-scoring applied, or unchanged for ``none``.

    Columns whose sample standard deviation is below 1e-12 are only centered.
    """
    mode = Standardization(mode)
    if mode is Standardization.NONE:
        return dataset

    samples = dataset.samples
    mean = samples.mean(axis=0)
    std = samples.std(axis=0, ddof=1)
    scale = np.where(std < _ZERO_STD, 1.0, std)
    scaled = (samples - mean) / scale
    metadata = {**dataset.metadata, "standardization": mode.value}
    return Dataset(scaled, dataset.labels, dataset.name, metadata)
