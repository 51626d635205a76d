"""Matrix value types shared by the similarity and spectral stages."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from ips2.errors import ParseError, SizeError


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Dense symmetric matrix of Euclidean sample distances."""

    values: np.ndarray

    def __post_init__(self) -> None:
        """Freeze the backing array."""
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, float)))

    @property
    def m(self) -> int:
        """Number of samples."""
        return int(self.values.shape[0])


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Dense symmetric nonnegative affinity matrix (S, V or U)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        """Freeze the backing array and check it is square."""
        values = np.asarray(self.values, float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise SizeError(f"similarity must be square, got shape {values.shape}")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def m(self) -> int:
        """Number of samples."""
        return int(self.values.shape[0])


@dataclass(frozen=True, eq=False)
class HighOrderSimilarity(SimilarityMatrix):
    """Similarity folded from eigenvectors of the unfolded tensor Laplacian."""

    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class NeighborSets:
    """Symmetrized, self-inclusive nearest-neighbor sets, one sorted array per sample."""

    neighbors: tuple[np.ndarray, ...]
    k: int

    @property
    def m(self) -> int:
        """Number of samples."""
        return len(self.neighbors)

    def as_boolean(self) -> np.ndarray:
        """Return the neighbor relation as an m×m boolean matrix."""
        relation = np.zeros((self.m, self.m), dtype=bool)
        for i, nbrs in enumerate(self.neighbors):
            relation[i, nbrs] = True
        return relation


@dataclass(frozen=True, eq=False)
class SparseSymMatrix:
    """Symmetric matrix stored as a sorted coordinate list of its upper triangle.

    Each unordered off-diagonal pair is stored once with ``row < col``; diagonal
    entries are stored with ``row == col``. Coordinates are sorted row-major and
    unique, so two builds of the same matrix hold identical arrays.
    """

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    _csr: list[sp.csr_matrix] = field(
        default_factory=list, repr=False, compare=False
    )

    @classmethod
    def from_entries(
        cls,
        dim: int,
        rows: np.ndarray,
        cols: np.ndarray,
        values: np.ndarray,
    ) -> SparseSymMatrix:
        """Canonicalize coordinates (upper triangle, sorted) and build the matrix.

        Raises:
            SizeError: On out-of-range or duplicate coordinates.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        if not (rows.shape == cols.shape == values.shape):
            raise SizeError("coordinate arrays must have equal length")
        if rows.size and (min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= dim):
            raise SizeError(f"coordinate outside a {dim}x{dim} matrix")
        if not np.all(np.isfinite(values)):
            raise SizeError("sparse matrix values must be finite")

        upper_rows = np.minimum(rows, cols)
        upper_cols = np.maximum(rows, cols)
        order = np.lexsort((upper_cols, upper_rows))
        upper_rows, upper_cols, values = upper_rows[order], upper_cols[order], values[order]
        if upper_rows.size > 1:
            same = (np.diff(upper_rows) == 0) & (np.diff(upper_cols) == 0)
            if np.any(same):
                at = int(np.argmax(same))
                raise SizeError(
                    f"duplicate coordinate ({upper_rows[at]}, {upper_cols[at]})"
                )
        return cls(
            dim=int(dim),
            rows=_readonly(upper_rows),
            cols=_readonly(upper_cols),
            values=_readonly(values),
        )

    @classmethod
    def from_dense(cls, matrix: np.ndarray) -> SparseSymMatrix:
        """Build from a dense symmetric matrix, keeping its nonzero upper triangle."""
        matrix = np.asarray(matrix, dtype=float)
        rows, cols = np.nonzero(np.triu(matrix))
        return cls.from_entries(matrix.shape[0], rows, cols, matrix[rows, cols])

    @property
    def nnz(self) -> int:
        """Number of stored (upper-triangle) entries."""
        return int(self.values.size)

    def with_values(self, values: np.ndarray) -> SparseSymMatrix:
        """Return a matrix with the same pattern and new values."""
        return SparseSymMatrix(
            dim=self.dim, rows=self.rows, cols=self.cols, values=_readonly(values)
        )

    def to_csr(self) -> sp.csr_matrix:
        """Return the full symmetric matrix in CSR form (cached)."""
        if not self._csr:
            off = self.rows != self.cols
            full_rows = np.concatenate([self.rows, self.cols[off]])
            full_cols = np.concatenate([self.cols, self.rows[off]])
            full_values = np.concatenate([self.values, self.values[off]])
            csr = sp.csr_matrix(
                (full_values, (full_rows, full_cols)), shape=(self.dim, self.dim)
            )
            csr.sort_indices()
            self._csr.append(csr)
        return self._csr[0]

    def to_dense(self) -> np.ndarray:
        """Return the full symmetric matrix as a dense array."""
        dense = np.zeros((self.dim, self.dim))
        dense[self.rows, self.cols] = self.values
        dense[self.cols, self.rows] = self.values
        return dense

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Multiply the full symmetric matrix by ``x``."""
        return np.asarray(self.to_csr() @ x)

    def to_csv(self, path: Path) -> None:
        """Write ``dim`` on the first line, then one ``row,col,value`` line per entry."""
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(f"{self.dim}\n")
            for r, c, v in zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist()):
                handle.write(f"{r},{c},{v:.17g}\n")

    @classmethod
    def from_csv(cls, path: Path) -> SparseSymMatrix:
        """Read a matrix written by :meth:`to_csv`."""
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        if not lines:
            raise ParseError("empty coordinate file", row=0)
        try:
            dim = int(lines[0])
        except ValueError:
            raise ParseError("first line must hold the dimension", row=0) from None
        rows, cols, values = [], [], []
        for index, line in enumerate(lines[1:], start=1):
            parts = line.split(",")
            if len(parts) != 3:
                raise ParseError("expected row,col,value", row=index)
            try:
                rows.append(int(parts[0]))
                cols.append(int(parts[1]))
                values.append(float(parts[2]))
            except ValueError:
                raise ParseError("non-numeric coordinate entry", row=index) from None
        return cls.from_entries(dim, np.array(rows), np.array(cols), np.array(values))


@dataclass(frozen=True, eq=False)
class EigenPairs:
    """Top eigenpairs of a symmetric operator, eigenvalues descending.

    ``vectors`` has one column per eigenvalue.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray

    @property
    def count(self) -> int:
        """Number of pairs."""
        return int(self.values.size)
