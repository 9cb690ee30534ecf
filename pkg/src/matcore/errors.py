"""Exception hierarchy shared by every workbench module."""
from __future__ import annotations

from typing import Any, Dict, Mapping


class WorkbenchError(Exception):
    """Base error carrying a structured ``detail`` mapping.

    The CLI serialises ``detail`` into its error payload, so values stored here
    should be JSON friendly (floats, ints, strings, lists).
    """

    def __init__(self, message: str, **detail: Any) -> None:
        super().__init__(message)
        self.message = message
        self.detail: Dict[str, Any] = dict(detail)

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON serialisable description of the error."""

        return {"error": type(self).__name__, "message": self.message, "detail": dict(self.detail)}


class PreconditionError(WorkbenchError, ValueError):
    """An input violates a documented precondition."""

    def __init__(self, message: str, *, precondition: str, **detail: Any) -> None:
        super().__init__(message, precondition=precondition, **detail)
        self.precondition = precondition


class NotSquareError(PreconditionError):
    def __init__(self, shape: tuple[int, ...]) -> None:
        super().__init__(f"Expected a square matrix, got shape {shape}.", precondition="square", shape=list(shape))


class NotHermitianError(PreconditionError):
    def __init__(self, deviation: float, bound: float) -> None:
        super().__init__(
            f"Matrix is not Hermitian: |M - M*| = {deviation:.3e} exceeds {bound:.3e}.",
            precondition="hermitian",
            deviation=deviation,
            bound=bound,
        )
        self.deviation = deviation


class NotAContractionError(PreconditionError):
    def __init__(self, norm: float, bound: float = 1.0) -> None:
        super().__init__(
            f"Operator is not a contraction: spectral norm {norm:.12g} > {bound:.12g}.",
            precondition="contraction",
            norm=norm,
        )
        self.norm = norm


class NotIsometricError(PreconditionError):
    def __init__(self, defect: float, *, kind: str = "isometry") -> None:
        super().__init__(
            f"Operator family is not a {kind} family: defect {defect:.3e}.",
            precondition=kind,
            defect=defect,
        )
        self.defect = defect


class GramMismatchError(PreconditionError):
    def __init__(self, max_deviation: float) -> None:
        super().__init__(
            f"Not an isometric correspondence: Gram matrices differ by {max_deviation:.3e}.",
            precondition="isometric correspondence",
            max_deviation=max_deviation,
        )
        self.max_deviation = max_deviation


class SingularResolventError(PreconditionError):
    def __init__(self, sigma_min: float) -> None:
        super().__init__(
            f"Resolvent is numerically singular: smallest singular value {sigma_min:.3e}.",
            precondition="invertible resolvent",
            sigma_min=sigma_min,
        )
        self.sigma_min = sigma_min


class NotDissipativeError(PreconditionError):
    def __init__(self, eigenvalue: float) -> None:
        super().__init__(
            f"Generator is not dissipative: A + A* has eigenvalue {eigenvalue:.6g} > 0.",
            precondition="dissipative",
            eigenvalue=eigenvalue,
        )
        self.eigenvalue = eigenvalue


class NotCommutingError(PreconditionError):
    def __init__(self, residual: float, bound: float) -> None:
        super().__init__(
            f"Operators do not commute: residual {residual:.3e} exceeds {bound:.3e}.",
            precondition="commuting",
            residual=residual,
            bound=bound,
        )
        self.residual = residual


class EigenvalueOneError(PreconditionError):
    def __init__(self, gap: float, gap_tol: float, *, operator: str = "T") -> None:
        super().__init__(
            f"{operator} has an eigenvalue within {gap_tol:.1e} of 1 (distance {gap:.3e}).",
            precondition="1 is not an eigenvalue",
            gap=gap,
            gap_tol=gap_tol,
            operator=operator,
        )
        self.gap = gap


class InvarianceError(WorkbenchError):
    """A subspace the construction needs to be invariant is not."""

    def __init__(self, subspace: str, residual: float, bound: float) -> None:
        super().__init__(
            f"Subspace {subspace} is not invariant: residual {residual:.3e} exceeds {bound:.3e}.",
            subspace=subspace,
            residual=residual,
            bound=bound,
        )
        self.subspace = subspace
        self.residual = residual


class LatticeError(PreconditionError):
    """An index element does not live in the lattice an operation needs."""

    def __init__(self, message: str, **detail: Any) -> None:
        super().__init__(message, precondition="lattice membership", **detail)


class StageError(WorkbenchError, RuntimeError):
    """Failure inside a named stage of a multi-stage pipeline."""

    def __init__(self, stage: str, cause: Exception) -> None:
        inner: Mapping[str, Any] = cause.to_dict() if isinstance(cause, WorkbenchError) else {"message": str(cause)}
        super().__init__(f"stage '{stage}' failed: {cause}", stage=stage, cause=dict(inner))
        self.stage = stage
        self.cause = cause


__all__ = [
    "EigenvalueOneError",
    "GramMismatchError",
    "InvarianceError",
    "LatticeError",
    "NotAContractionError",
    "NotCommutingError",
    "NotDissipativeError",
    "NotHermitianError",
    "NotIsometricError",
    "NotSquareError",
    "PreconditionError",
    "SingularResolventError",
    "StageError",
    "WorkbenchError",
]
