"""Degrees, normalized Laplacians and top eigenpairs of symmetric matrices."""

from __future__ import annotations

import logging
from typing import Callable, TypeVar

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from opentelemetry import trace
from scipy.sparse.csgraph import connected_components

from ips2.errors import ConvergenceError, DomainError, SizeError
from ips2.models.matrices import EigenPairs, SimilarityMatrix, SparseSymMatrix
from ips2.seeding import Stream, rng_for

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

DEGREE_FLOOR = 1e-12
DENSE_CAP = 400
_BREAKDOWN = 1e-14

Operand = TypeVar("Operand", SparseSymMatrix, SimilarityMatrix, np.ndarray)


def _stored_values(a: SparseSymMatrix | SimilarityMatrix | np.ndarray) -> np.ndarray:
    if isinstance(a, (SparseSymMatrix, SimilarityMatrix)):
        return a.values
    return np.asarray(a, dtype=float)


def degree_vector(a: SparseSymMatrix | SimilarityMatrix | np.ndarray) -> np.ndarray:
    """Row sums of the full symmetric matrix.

    Raises:
        DomainError: If any entry is negative.
    """
    if np.any(_stored_values(a) < 0):
        raise DomainError("degrees are defined for nonnegative matrices only")
    if isinstance(a, SparseSymMatrix):
        return np.asarray(a.to_csr().sum(axis=1)).ravel()
    return _stored_values(a).sum(axis=1)


def normalized_laplacian(a: Operand) -> Operand:
    """``D^-1/2 A D^-1/2`` with degrees floored at 1e-12; same type as the input."""
    degrees = degree_vector(a)
    if np.any(degrees < DEGREE_FLOOR):
        logger.warning(f"{int(np.sum(degrees < DEGREE_FLOOR))} zero-degree rows floored")
    inv_sqrt = 1.0 / np.sqrt(np.maximum(degrees, DEGREE_FLOOR))

    if isinstance(a, SparseSymMatrix):
        with tracer.start_as_current_span("ips2.laplacian", attributes={"dim": a.dim}):
            return a.with_values(inv_sqrt[a.rows] * a.values * inv_sqrt[a.cols])
    scaled = inv_sqrt[:, None] * _stored_values(a) * inv_sqrt[None, :]
    if isinstance(a, SimilarityMatrix):
        return SimilarityMatrix(scaled)
    return scaled


def canonical_sign(vector: np.ndarray) -> np.ndarray:
    """Flip ``vector`` so its first largest-magnitude entry is nonnegative."""
    pivot = int(np.argmax(np.abs(vector)))
    return -vector if vector[pivot] < 0 else vector


def _max_row_norm(a: SparseSymMatrix | np.ndarray) -> float:
    if isinstance(a, SparseSymMatrix):
        return float(abs(a.to_csr()).sum(axis=1).max()) if a.nnz else 0.0
    return float(np.abs(a).sum(axis=1).max())


def _residuals(
    matvec: Callable[[np.ndarray], np.ndarray], values: np.ndarray, vectors: np.ndarray
) -> np.ndarray:
    return np.array(
        [
            np.linalg.norm(matvec(vectors[:, i]) - values[i] * vectors[:, i])
            for i in range(values.size)
        ]
    )


def _dense_top(matrix: np.ndarray, c: int) -> tuple[np.ndarray, np.ndarray]:
    dim = matrix.shape[0]
    values, vectors = scipy.linalg.eigh(matrix, subset_by_index=[dim - c, dim - 1])
    return values[::-1], vectors[:, ::-1]


class _Lanczos:
    """Symmetric Lanczos with full reorthogonalization and explicit deflation.

    Each pass builds a Krylov basis orthogonal to the already locked eigenvectors
    and stops once the dominant Ritz pair meets the residual tolerance; that pair
    is then locked. Repeated eigenvalues are therefore recovered one copy per pass.
    The first breakdown of a pass restarts the recurrence once from a fresh deflated
    vector, so a start vector inside a small invariant subspace can still reach the
    dominant pair.
    """

    def __init__(
        self,
        operator: sp.csr_matrix,
        scale: float,
        tol: float,
        max_iter: int,
        rng: np.random.Generator,
    ) -> None:
        self.operator = operator
        self.dim = operator.shape[0]
        self.scale = scale
        self.tol = tol * max(scale, np.finfo(float).tiny)
        self.max_iter = max_iter
        self.rng = rng
        self.locked = np.empty((self.dim, 0))
        self.locked_values: list[float] = []

    def _deflate(self, w: np.ndarray, basis: np.ndarray) -> np.ndarray:
        for _ in range(2):
            if self.locked.shape[1]:
                w = w - self.locked @ (self.locked.T @ w)
            if basis.shape[1]:
                w = w - basis @ (basis.T @ w)
        return w

    def _start_vector(self) -> np.ndarray:
        q = self._deflate(self.rng.standard_normal(self.dim), np.empty((self.dim, 0)))
        return q / np.linalg.norm(q)

    def _restart_vector(self, basis: np.ndarray) -> np.ndarray:
        q = self._deflate(self.rng.standard_normal(self.dim), basis)
        return q / np.linalg.norm(q)

    def dominant(self) -> tuple[float, np.ndarray]:
        steps = min(self.max_iter, self.dim - self.locked.shape[1])
        capacity = min(steps + 1, 64)
        basis = np.empty((self.dim, capacity))
        basis[:, 0] = self._start_vector()
        alphas: list[float] = []
        betas: list[float] = []
        restarted = False
        best = np.inf

        for j in range(steps):
            q = basis[:, j]
            w = self.operator @ q
            if j:
                w = w - betas[-1] * basis[:, j - 1]
            alpha = float(q @ w)
            alphas.append(alpha)
            w = self._deflate(w - alpha * q, basis[:, : j + 1])
            beta = float(np.linalg.norm(w))

            if j == 0:
                theta, ritz = alpha, np.ones(1)
            else:
                thetas, ritz_vectors = scipy.linalg.eigh_tridiagonal(
                    np.array(alphas), np.array(betas), select="i", select_range=(j, j)
                )
                theta, ritz = float(thetas[0]), ritz_vectors[:, 0]
            vector = basis[:, : j + 1] @ ritz if restarted else None
            if vector is not None:
                # the recurrence no longer bounds the residual once a coupling was dropped
                residual = float(np.linalg.norm(self.operator @ vector - theta * vector))
            else:
                residual = beta * abs(ritz[-1])
            best = min(best, residual)

            restart = beta <= _BREAKDOWN * self.scale and not restarted and j + 1 < steps
            if residual <= self.tol and not restart:
                logger.debug(
                    f"Lanczos pass {len(self.locked_values) + 1}: {j + 1} steps, "
                    f"theta={theta:.12g}, residual={residual:.2e}"
                )
                if vector is None:
                    vector = basis[:, : j + 1] @ ritz
                return theta, vector / np.linalg.norm(vector)

            if not restart and (beta <= _BREAKDOWN * self.scale or j + 1 == steps):
                break

            if j + 1 == basis.shape[1]:
                grown = np.empty((self.dim, min(2 * basis.shape[1], steps + 1)))
                grown[:, : basis.shape[1]] = basis
                basis = grown
            if restart:
                logger.debug(f"Lanczos breakdown after {j + 1} steps, restarting")
                restarted = True
                basis[:, j + 1] = self._restart_vector(basis[:, : j + 1])
                betas.append(0.0)
            else:
                basis[:, j + 1] = w / beta
                betas.append(beta)

        raise ConvergenceError(
            f"Lanczos did not converge within {steps} steps", best_residual=float(best)
        )

    def top(self, c: int) -> tuple[np.ndarray, np.ndarray]:
        for _ in range(c):
            theta, vector = self.dominant()
            self.locked = np.column_stack([self.locked, vector])
            self.locked_values.append(theta)
        values = np.array(self.locked_values)
        order = np.argsort(-values, kind="stable")
        return values[order], self.locked[:, order]


def top_eigenpairs(
    a: SparseSymMatrix | SimilarityMatrix | np.ndarray,
    c: int,
    tol: float = 1e-10,
    max_iter: int = 1000,
    seed: int = 0,
    dense_cap: int = DENSE_CAP,
) -> EigenPairs:
    """The ``c`` algebraically largest eigenpairs of a symmetric matrix.

    Matrices of dimension up to ``dense_cap`` go to a dense symmetric solver;
    larger ones to seeded Lanczos. Every vector is unit length and sign-fixed so
    its first largest-magnitude entry is nonnegative.

    Args:
        a: Symmetric matrix, sparse or dense.
        c: Number of pairs.
        tol: Residual tolerance relative to the largest absolute row sum.
        max_iter: Krylov steps allowed per Lanczos pass.
        seed: Seed of the Lanczos start vectors.
        dense_cap: Largest dimension solved densely.

    Raises:
        SizeError: If ``c`` is outside ``1..dim``.
        ConvergenceError: If a Lanczos pass exhausts ``max_iter`` steps.
    """
    sparse = a if isinstance(a, SparseSymMatrix) else None
    dense = None if sparse is not None else _stored_values(a)
    dim = sparse.dim if sparse is not None else dense.shape[0]
    if not 1 <= c <= dim:
        raise SizeError(f"requested {c} eigenpairs of a {dim}x{dim} matrix")

    with tracer.start_as_current_span("ips2.eigensolve", attributes={"dim": dim, "c": c}):
        if dim <= dense_cap:
            matrix = sparse.to_dense() if sparse is not None else dense
            values, vectors = _dense_top(matrix, c)
            matvec: Callable[[np.ndarray], np.ndarray] = lambda x: matrix @ x  # noqa: E731
        else:
            operator = sparse.to_csr() if sparse is not None else sp.csr_matrix(dense)
            scale = _max_row_norm(sparse if sparse is not None else dense)
            solver = _Lanczos(
                operator,
                scale=scale,
                tol=tol,
                max_iter=max_iter,
                rng=rng_for(seed, Stream.LANCZOS),
            )
            values, vectors = solver.top(c)
            matvec = lambda x: operator @ x  # noqa: E731

        vectors = np.column_stack([canonical_sign(vectors[:, i]) for i in range(c)])
        return EigenPairs(
            values=values, vectors=vectors, residuals=_residuals(matvec, values, vectors)
        )


def unit_eigenspace(a: SparseSymMatrix | SimilarityMatrix | np.ndarray) -> np.ndarray:
    """Component basis of the eigenvalue-1 eigenspace of ``normalized_laplacian(a)``.

    Every connected component ``C`` whose degrees all reach the floor contributes
    ``D^1/2 1_C`` (unit length, zero off ``C``), an exact eigenvector for 1, the
    largest eigenvalue. Columns are ordered by component volume, largest first,
    ties going to the component holding the lowest index.
    """
    degrees = degree_vector(a)
    graph = (a.to_csr() if isinstance(a, SparseSymMatrix) else sp.csr_matrix(_stored_values(a))).copy()
    graph.eliminate_zeros()
    count, labels = connected_components(graph, directed=False)

    components = []
    for label in range(count):
        members = np.flatnonzero(labels == label)
        if degrees[members].min() >= DEGREE_FLOOR:
            components.append((-float(degrees[members].sum()), int(members[0]), members))
    components.sort(key=lambda item: item[:2])

    basis = np.zeros((degrees.size, len(components)))
    for column, (_, _, members) in enumerate(components):
        weights = np.sqrt(degrees[members])
        basis[members, column] = weights / np.linalg.norm(weights)
    return basis


def laplacian_eigenpairs(
    a: SparseSymMatrix | SimilarityMatrix | np.ndarray,
    c: int,
    tol: float = 1e-10,
    max_iter: int = 1000,
    seed: int = 0,
    dense_cap: int = DENSE_CAP,
) -> EigenPairs:
    """Top ``c`` eigenpairs of the normalized Laplacian of ``a``.

    When the graph of ``a`` splits into several components the eigenvalue 1 is
    repeated and any rotation of its eigenspace is a valid answer; the component
    basis of :func:`unit_eigenspace` is returned for it instead, so the result is
    deterministic. Eigenpairs below 1 come from :func:`top_eigenpairs`.
    """
    dim = degree_vector(a).size
    if not 1 <= c <= dim:
        raise SizeError(f"requested {c} eigenpairs of a {dim}x{dim} matrix")
    laplacian = normalized_laplacian(a)
    basis = unit_eigenspace(a)
    repeated = basis.shape[1]
    if repeated < 2:
        return top_eigenpairs(laplacian, c, tol, max_iter, seed, dense_cap)

    logger.info(f"Eigenvalue 1 has multiplicity {repeated}; using the component basis")
    if repeated >= c:
        values, vectors = np.ones(c), basis[:, :c]
    else:
        pairs = top_eigenpairs(laplacian, c, tol, max_iter, seed, dense_cap)
        values = np.concatenate([np.ones(repeated), pairs.values[repeated:]])
        vectors = np.column_stack([basis, pairs.vectors[:, repeated:]])

    if isinstance(laplacian, SparseSymMatrix):
        matvec: Callable[[np.ndarray], np.ndarray] = laplacian.matvec
    else:
        dense = _stored_values(laplacian)
        matvec = lambda x: dense @ x  # noqa: E731
    return EigenPairs(
        values=values, vectors=vectors, residuals=_residuals(matvec, values, vectors)
    )
