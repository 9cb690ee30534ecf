"""Dense complex linear algebra primitives consumed by every dilation module.

All operators are two dimensional ``numpy`` arrays of ``complex128``. The
functions here are pure: they never modify their inputs and keep no state, so
callers may evaluate them from several threads at once.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg
from scipy.stats import unitary_group

from .errors import (
    GramMismatchError,
    NotAContractionError,
    NotHermitianError,
    NotSquareError,
    PreconditionError,
)

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

ComplexMatrix = npt.NDArray[np.complex128]

EQUALITY_TOL = 1e-9
RANK_TOL = 1e-7


@dataclass(frozen=True)
class Tolerance:
    """Positive threshold used for equality, rank or gap decisions."""

    value: float = EQUALITY_TOL

    def __post_init__(self) -> None:
        if not self.value > 0:
            raise ValueError(f"Tolerance must be positive, got {self.value!r}.")

    def __float__(self) -> float:
        return float(self.value)


TolLike = Union[float, Tolerance]


def resolve_tol(tol: TolLike) -> float:
    """Return ``tol`` as a float, validating it like :class:`Tolerance`."""

    return float(tol) if isinstance(tol, Tolerance) else float(Tolerance(float(tol)))


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of :func:`psd_check`."""

    passed: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.passed


# ----------------------------------------------------------------------
# Construction and elementary helpers
# ----------------------------------------------------------------------
def as_matrix(values: Any) -> ComplexMatrix:
    """Return ``values`` as a finite two dimensional complex matrix.

    Scalars become ``1 x 1`` matrices. The result is always a fresh copy.

    Raises:
        PreconditionError: If the input is not two dimensional or holds NaN/Inf.
    """

    matrix = np.array(values, dtype=np.complex128)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    if matrix.ndim != 2:
        raise PreconditionError(
            f"Expected a two dimensional matrix, got {matrix.ndim} dimensions.",
            precondition="two dimensional",
        )
    if not np.isfinite(matrix).all():
        raise PreconditionError("Matrix entries must be finite.", precondition="finite entries")
    return matrix


def adjoint(matrix: ComplexMatrix) -> ComplexMatrix:
    """Conjugate transpose."""

    return np.conj(matrix).T


def identity(dim: int) -> ComplexMatrix:
    return np.eye(dim, dtype=np.complex128)


def spectral_norm(matrix: ComplexMatrix) -> float:
    """Largest singular value; ``0.0`` for empty matrices."""

    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def require_square(matrix: ComplexMatrix) -> int:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NotSquareError(tuple(matrix.shape))
    return int(matrix.shape[0])


def hermitian_part(matrix: ComplexMatrix) -> ComplexMatrix:
    return (matrix + adjoint(matrix)) / 2


def commutator_norm(left: ComplexMatrix, right: ComplexMatrix) -> float:
    return spectral_norm(left @ right - right @ left)


def require_contraction(matrix: ComplexMatrix, tol: TolLike = EQUALITY_TOL) -> float:
    """Return the spectral norm of ``matrix`` or raise if it exceeds ``1 + tol``."""

    require_square(matrix)
    norm = spectral_norm(matrix)
    if norm > 1.0 + resolve_tol(tol):
        raise NotAContractionError(norm)
    return norm


def isometry_defect(matrix: ComplexMatrix) -> float:
    """``|V*V - I|``; zero exactly for isometries."""

    return spectral_norm(adjoint(matrix) @ matrix - identity(matrix.shape[1]))


def unitarity_defect(matrix: ComplexMatrix) -> float:
    """Largest of ``|G*G - I|`` and ``|GG* - I|``."""

    return max(isometry_defect(matrix), isometry_defect(adjoint(matrix)))


def compress(operator: ComplexMatrix, basis: ComplexMatrix) -> ComplexMatrix:
    """Matrix of ``P V|`` in the orthonormal ``basis``: ``Q* V Q``."""

    return adjoint(basis) @ operator @ basis


# ----------------------------------------------------------------------
# Spectral primitives
# ----------------------------------------------------------------------
def psd_check(matrix: ComplexMatrix, tol: TolLike = EQUALITY_TOL) -> PsdVerdict:
    """Decide positive semidefiniteness of a Hermitian matrix.

    The verdict is ``lambda_min >= -tol``. Since the threshold is absolute, a
    matrix that passes at ``tol`` passes at ``c * tol`` after scaling by ``c``.

    Raises:
        NotSquareError: For non-square input.
        NotHermitianError: When ``|M - M*| > tol * |M|``.
    """

    tol_value = resolve_tol(tol)
    dim = require_square(matrix)
    if dim == 0:
        return PsdVerdict(passed=True, min_eigenvalue=0.0)
    bound = tol_value * spectral_norm(matrix)
    deviation = spectral_norm(matrix - adjoint(matrix))
    if deviation > bound:
        raise NotHermitianError(deviation, bound)
    eigenvalues = scipy.linalg.eigvalsh(hermitian_part(matrix))
    lam_min = float(eigenvalues[0])
    log.debug("psd_check: dim=%d lambda_min=%.3e", dim, lam_min)
    return PsdVerdict(passed=lam_min >= -tol_value, min_eigenvalue=lam_min)


def principal_sqrt(matrix: ComplexMatrix, tol: TolLike = EQUALITY_TOL) -> ComplexMatrix:
    """Principal square root of a Hermitian PSD matrix.

    Negative eigenvalues no smaller than ``-tol`` are clamped to zero.
    """

    tol_value = resolve_tol(tol)
    dim = require_square(matrix)
    if dim == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    eigenvalues, vectors = scipy.linalg.eigh(hermitian_part(matrix))
    if eigenvalues[0] < -tol_value:
        raise PreconditionError(
            f"Matrix is not positive semidefinite: lambda_min = {eigenvalues[0]:.3e}.",
            precondition="positive semidefinite",
            min_eigenvalue=float(eigenvalues[0]),
        )
    if eigenvalues[0] < 0:
        log.debug("principal_sqrt: clamping lambda_min=%.3e to zero", eigenvalues[0])
    roots = np.sqrt(np.clip(eigenvalues, 0.0, None))
    root = (vectors * roots) @ adjoint(vectors)
    return hermitian_part(root)


def defect(operator: ComplexMatrix, tol: TolLike = EQUALITY_TOL) -> ComplexMatrix:
    """Defect operator ``D_T = (I - T*T)^{1/2}`` of a contraction.

    Raises:
        NotAContractionError: If ``|T| > 1 + tol``; carries the computed norm.
    """

    operator = as_matrix(operator)
    require_contraction(operator, tol)
    dim = operator.shape[0]
    # A norm of 1 + tol makes I - T*T dip below zero by about 2 tol.
    return principal_sqrt(identity(dim) - adjoint(operator) @ operator, 3 * resolve_tol(tol))


def numerical_kernel(matrix: ComplexMatrix, tol: TolLike = RANK_TOL) -> ComplexMatrix:
    """Orthonormal basis (as columns) of the numerical kernel of ``matrix``.

    Singular values at most ``tol * sigma_max`` count as zero; a zero matrix has
    the whole space as kernel and returns the identity basis.
    """

    tol_value = resolve_tol(tol)
    matrix = np.asarray(matrix, dtype=np.complex128)
    cols = matrix.shape[1]
    if matrix.shape[0] == 0 or cols == 0 or spectral_norm(matrix) == 0.0:
        return identity(cols)
    return scipy.linalg.null_space(matrix, rcond=tol_value).astype(np.complex128)


def span_orthonormalize(vectors: ComplexMatrix, tol: TolLike = RANK_TOL) -> ComplexMatrix:
    """Orthonormal basis of the column span of ``vectors``, in input order.

    Modified Gram-Schmidt with one reorthogonalisation pass. A column is kept
    when its residual after projection exceeds ``tol`` times the largest input
    column norm, so leading columns that are already orthonormal come back
    unchanged (up to rounding).
    """

    tol_value = resolve_tol(tol)
    vectors = np.asarray(vectors, dtype=np.complex128)
    rows, cols = vectors.shape
    if cols == 0:
        return np.zeros((rows, 0), dtype=np.complex128)
    scale = float(np.max(np.linalg.norm(vectors, axis=0)))
    if scale == 0.0:
        return np.zeros((rows, 0), dtype=np.complex128)
    threshold = tol_value * scale
    basis: list[np.ndarray] = []
    for index in range(cols):
        candidate = vectors[:, index].copy()
        for _ in range(2):
            for column in basis:
                candidate -= column * np.vdot(column, candidate)
        norm = float(np.linalg.norm(candidate))
        if norm > threshold:
            basis.append(candidate / norm)
    if not basis:
        return np.zeros((rows, 0), dtype=np.complex128)
    return np.stack(basis, axis=1)


def orthonormal_complement(basis: ComplexMatrix) -> ComplexMatrix:
    """Orthonormal basis of the complement of ``span(basis)``.

    ``basis`` must have orthonormal columns. The complement is seeded from the
    standard basis by pivoted Gram-Schmidt: each step takes the coordinate
    vector with the largest residual, ties going to the lowest coordinate. A
    subspace spanned by coordinate vectors therefore gets the remaining
    coordinate vectors, in order, as its complement.
    """

    basis = np.asarray(basis, dtype=np.complex128)
    dim, rank = basis.shape
    residuals = identity(dim) - basis @ adjoint(basis)
    chosen: list[np.ndarray] = []
    for _ in range(dim - rank):
        norms = np.linalg.norm(residuals, axis=0)
        pivot = int(np.argmax(norms))
        vector = residuals[:, pivot] / norms[pivot]
        for previous in (basis, *(column[:, None] for column in chosen)):
            vector = vector - previous @ (adjoint(previous) @ vector)
        vector = vector / np.linalg.norm(vector)
        chosen.append(vector)
        residuals = residuals - np.outer(vector, np.conj(vector) @ residuals)
    if not chosen:
        return np.zeros((dim, 0), dtype=np.complex128)
    return np.stack(chosen, axis=1)


def extend_isometry_to_unitary(
    domain_vectors: ComplexMatrix,
    image_vectors: ComplexMatrix,
    ambient_dim: int | None = None,
    *,
    tol: TolLike = EQUALITY_TOL,
    seed: int | None = None,
) -> ComplexMatrix:
    """Unitary ``G`` with ``G @ domain_vectors = image_vectors``.

    The hypothesis is that the two families have equal Gram matrices, which
    makes ``d_k -> i_k`` extend linearly to an isometry between their spans.
    The span map is the polar part of that correspondence; on the orthogonal
    complements ``G`` matches the deterministic complement bases produced by
    :func:`orthonormal_complement`. Passing ``seed`` rotates the image
    complement by a seeded Haar unitary, which gives a different but equally
    valid completion.

    Raises:
        PreconditionError: On shape mismatches.
        GramMismatchError: When the Gram matrices differ by more than ``tol``
            relative to their size.
    """

    tol_value = resolve_tol(tol)
    domain = np.asarray(domain_vectors, dtype=np.complex128)
    image = np.asarray(image_vectors, dtype=np.complex128)
    dim = domain.shape[0] if ambient_dim is None else int(ambient_dim)
    if domain.shape != image.shape or domain.shape[0] != dim:
        raise PreconditionError(
            f"Domain {domain.shape} and image {image.shape} must both have {dim} rows and equal columns.",
            precondition="matching shapes",
        )

    gram_domain = adjoint(domain) @ domain
    gram_image = adjoint(image) @ image
    deviation = float(np.max(np.abs(gram_domain - gram_image))) if domain.shape[1] else 0.0
    if deviation > tol_value * max(1.0, spectral_norm(gram_domain)):
        raise GramMismatchError(deviation)

    if domain.shape[1]:
        left, sigma, right_h = scipy.linalg.svd(domain, full_matrices=False)
        rank = int(np.count_nonzero(sigma > RANK_TOL * sigma[0])) if sigma[0] > 0 else 0
    else:
        left, sigma, right_h, rank = domain, np.zeros(0), np.zeros((0, 0)), 0
    source = left[:, :rank]
    target = image @ adjoint(right_h[:rank]) / sigma[:rank] if rank else np.zeros((dim, 0), dtype=np.complex128)
    if rank:
        # Polar cleanup: the target columns are orthonormal up to the Gram tolerance.
        t_left, _, t_right_h = scipy.linalg.svd(target, full_matrices=False)
        target = t_left @ t_right_h

    source_perp = orthonormal_complement(source)
    target_perp = orthonormal_complement(target)
    free = dim - rank
    if source_perp.shape[1] != free or target_perp.shape[1] != free:
        raise PreconditionError(
            "Could not complete the correspondence to a unitary; complement ranks differ.",
            precondition="complementable spans",
            rank=rank,
        )
    if seed is not None and free:
        rng = np.random.default_rng(seed)
        if free > 1:
            rotation = unitary_group.rvs(free, random_state=rng)
        else:
            rotation = np.exp(2j * np.pi * rng.random()).reshape(1, 1)
        target_perp = target_perp @ rotation

    unitary = np.hstack([target, target_perp]) @ adjoint(np.hstack([source, source_perp]))
    log.debug(
        "extend_isometry_to_unitary: dim=%d rank=%d residual=%.3e",
        dim,
        rank,
        spectral_norm(unitary @ domain - image),
    )
    return unitary


__all__ = [
    "ComplexMatrix",
    "EQUALITY_TOL",
    "PsdVerdict",
    "RANK_TOL",
    "Tolerance",
    "TolLike",
    "adjoint",
    "as_matrix",
    "commutator_norm",
    "compress",
    "defect",
    "extend_isometry_to_unitary",
    "hermitian_part",
    "identity",
    "isometry_defect",
    "numerical_kernel",
    "orthonormal_complement",
    "principal_sqrt",
    "psd_check",
    "require_contraction",
    "require_square",
    "resolve_tol",
    "span_orthonormalize",
    "spectral_norm",
    "unitarity_defect",
]
