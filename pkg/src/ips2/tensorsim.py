"""Fourth-order pair-to-pair similarity in unfolded (m² × m²) form.

Index convention: entry ``T[i, j, k, l]`` scores pair ``(x_i, x_k)`` against pair
``(x_j, x_l)`` and lives at row ``unfold_index(i, j)``, column ``unfold_index(k, l)``
of the unfolded matrix. With this convention the unfolding of ``S[i,k] * S[j,l]`` is
exactly the Kronecker product ``S ⊗ S``.

``unfold_index`` and ``fold_index`` keep the 1-based contract of the unfolding;
every other function here takes 0-based sample indices.
"""

from __future__ import annotations

import logging

import numpy as np
from opentelemetry import trace

from ips2.errors import SizeError, TensorIndexError
from ips2.models.config import TensorParams
from ips2.models.matrices import (
    DistanceMatrix,
    NeighborSets,
    SimilarityMatrix,
    SparseSymMatrix,
)

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

DENSE_VERIFICATION_CAP = 32


def unfold_index(i: int, j: int, m: int) -> int:
    """Flat 1-based index ``m(j-1)+i`` of the 1-based pair ``(i, j)``.

    Raises:
        TensorIndexError: If ``i`` or ``j`` is outside ``1..m``.
    """
    if m < 1 or not (1 <= i <= m and 1 <= j <= m):
        raise TensorIndexError(f"pair ({i}, {j}) outside 1..{m}")
    return m * (j - 1) + i


def fold_index(r: int, m: int) -> tuple[int, int]:
    """Inverse of :func:`unfold_index`: the 1-based pair stored at flat index ``r``.

    Raises:
        TensorIndexError: If ``r`` is outside ``1..m²``.
    """
    if m < 1 or not 1 <= r <= m * m:
        raise TensorIndexError(f"flat index {r} outside 1..{m * m}")
    j, i = divmod(r - 1, m)
    return i + 1, j + 1


def unfold_tensor(tensor: np.ndarray) -> np.ndarray:
    """Reshape a dense ``m×m×m×m`` tensor into its ``m²×m²`` unfolding."""
    m = tensor.shape[0]
    if tensor.shape != (m, m, m, m):
        raise SizeError(f"expected an m×m×m×m tensor, got {tensor.shape}")
    # row j*m+i, column l*m+k (0-based form of m(j-1)+i, m(l-1)+k)
    return tensor.transpose(1, 0, 3, 2).reshape(m * m, m * m)


def decomposable_unfolded(
    s: SimilarityMatrix, cap: int = DENSE_VERIFICATION_CAP
) -> SparseSymMatrix:
    """Unfolding of the product tensor ``T[i,j,k,l] = S[i,k] * S[j,l]``.

    Equals ``S ⊗ S``. Materializes ``m⁴`` values, so it is meant for verification
    and small dumps.

    Raises:
        SizeError: If ``m`` exceeds ``cap``.
    """
    if s.m > cap:
        raise SizeError(f"m={s.m} exceeds the dense verification cap {cap}")
    tensor = np.einsum("ik,jl->ijkl", s.values, s.values)
    return SparseSymMatrix.from_dense(unfold_tensor(tensor))


def _pair_ratio_similarity(
    d_ij: np.ndarray | float,
    d_kl: np.ndarray | float,
    d_ik: np.ndarray | float,
    d_jl: np.ndarray | float,
    sigma: float,
    eps: float,
) -> np.ndarray:
    numerator = np.asarray(d_ij, float) + d_kl
    denominator = np.asarray(d_ik, float) + d_jl + eps
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(numerator == 0.0, 0.0, numerator / denominator)
    return np.exp(-sigma * ratio)


def indecomposable_entry(
    dist: DistanceMatrix, i: int, j: int, k: int, l: int, p: TensorParams
) -> float:
    """``exp(-sigma (d_ij + d_kl) / (d_ik + d_jl + eps))`` for 0-based samples.

    A zero numerator gives 1; with ``eps == 0`` a zero denominator under a positive
    numerator gives 0.
    """
    d = dist.values
    m = dist.m
    if not all(0 <= index < m for index in (i, j, k, l)):
        raise TensorIndexError(f"sample index outside 0..{m - 1}")
    return float(
        _pair_ratio_similarity(d[i, j], d[k, l], d[i, k], d[j, l], p.sigma_t, p.eps)
    )


def build_sparse_tensor(
    dist: DistanceMatrix, nbrs: NeighborSets, p: TensorParams
) -> SparseSymMatrix:
    """Unfolded indecomposable tensor restricted to neighbor pairs.

    Entry ``(unfold(i,j), unfold(k,l))`` is stored for every ``k`` in ``N(i)`` and
    ``l`` in ``N(j)``; everything else is a structural zero. Because the neighbor
    sets are symmetric, the stored pattern is closed under ``(i,j) <-> (k,l)``.
    Entries whose value underflows to 0 are still stored, so the coordinate set is
    exactly that pattern.
    """
    m = dist.m
    if nbrs.m != m:
        raise SizeError(f"neighbor sets cover {nbrs.m} samples, distances {m}")
    d = dist.values

    with tracer.start_as_current_span("ips2.tensor", attributes={"m": m, "k": p.k}):
        owners = np.concatenate(
            [np.full(n.size, j, dtype=np.int64) for j, n in enumerate(nbrs.neighbors)]
        )
        partners = np.concatenate(nbrs.neighbors).astype(np.int64)
        d_jl = d[owners, partners]

        row_chunks, col_chunks, value_chunks = [], [], []
        for i in range(m):
            ks = nbrs.neighbors[i].astype(np.int64)[:, None]
            rows = owners[None, :] * m + i
            cols = partners[None, :] * m + ks
            upper = rows <= cols
            values = _pair_ratio_similarity(
                d[i, owners][None, :],
                d[ks, partners[None, :]],
                d[i, ks],
                d_jl[None, :],
                p.sigma_t,
                p.eps,
            )
            row_chunks.append(np.broadcast_to(rows, upper.shape)[upper])
            col_chunks.append(cols[upper])
            value_chunks.append(values[upper])

        tensor = SparseSymMatrix.from_entries(
            m * m,
            np.concatenate(row_chunks),
            np.concatenate(col_chunks),
            np.concatenate(value_chunks),
        )
        logger.debug(f"Sparse tensor: dim={tensor.dim}, stored entries={tensor.nnz}")
        return tensor
