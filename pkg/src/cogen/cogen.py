"""Cayley-type transforms between semigroup generators and cogenerators.

A contraction semigroup ``T(s) = exp(sA)`` with dissipative generator ``A`` is
encoded by its cogenerator ``T = (A + I)(A - I)^{-1}``. The functional calculus
here moves between the two descriptions:

* ``phi_s(x) = (x - 1 + s) / (x - 1 - s)`` recovers ``T`` as the limit of
  ``phi_s(T(s))`` for ``s -> 0+``;
* ``e_s(x) = exp(s (x + 1) / (x - 1))`` rebuilds ``T(s) = e_s(T)``;
* ``e_{s,r}(x) = e_s(r x)`` is the radial regularisation, defined for every
  contraction because ``r T - I`` is invertible when ``r < 1``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
import scipy.linalg

from matcore import (
    EQUALITY_TOL,
    CheckReport,
    ComplexMatrix,
    TolLike,
    adjoint,
    as_matrix,
    commutator_norm,
    identity,
    psd_check,
    require_contraction,
    require_square,
    resolve_tol,
    spectral_norm,
)
from matcore.errors import (
    EigenvalueOneError,
    NotCommutingError,
    NotDissipativeError,
    PreconditionError,
    SingularResolventError,
)
from matcore.report import Check

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

GAP_TOL = 1e-6
LIMIT_S_VALUES = (1e-1, 1e-2, 1e-3)
RADIAL_R_VALUES = (0.9, 0.99, 0.999)
MIN_S = 1e-8

# Resolvents with sigma_min below this fraction of their scale count as singular.
_SINGULAR_REL = 1e-13


@dataclass(frozen=True)
class EigenvalueGap:
    """Distance of a spectrum to ``1`` and the verdict ``distance > gap_tol``."""

    passed: bool
    distance: float

    def __bool__(self) -> bool:
        return self.passed


def eigenvalue_one_check(matrix: ComplexMatrix, gap_tol: TolLike = GAP_TOL) -> EigenvalueGap:
    """Return ``min |lambda - 1|`` over the eigenvalues of ``matrix``.

    An empty matrix has no eigenvalues: the distance is infinite and the check
    passes.
    """

    matrix = np.asarray(matrix, dtype=np.complex128)
    dim = require_square(matrix)
    if dim == 0:
        return EigenvalueGap(passed=True, distance=float("inf"))
    distance = float(np.min(np.abs(scipy.linalg.eigvals(matrix) - 1.0)))
    return EigenvalueGap(passed=distance > resolve_tol(gap_tol), distance=distance)


def require_dissipative(generator: ComplexMatrix, tol: TolLike = EQUALITY_TOL) -> None:
    """Raise unless ``A + A*`` is negative semidefinite within ``tol``."""

    verdict = psd_check(-(generator + adjoint(generator)), tol)
    if not verdict.passed:
        raise NotDissipativeError(-verdict.min_eigenvalue)


def _solve_resolvent(resolvent: ComplexMatrix, numerator: ComplexMatrix) -> ComplexMatrix:
    """``resolvent^{-1} numerator`` for commuting factors, guarding singularity."""

    if resolvent.shape[0] == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    sigma = scipy.linalg.svdvals(resolvent)
    sigma_min = float(sigma[-1])
    if sigma_min <= _SINGULAR_REL * max(1.0, float(sigma[0])):
        raise SingularResolventError(sigma_min)
    log.debug("resolvent condition number %.3e", float(sigma[0]) / sigma_min)
    return scipy.linalg.solve(resolvent, numerator)


@dataclass(frozen=True, eq=False)
class GeneratorPair:
    """Two commuting dissipative generators on the same space ``H``."""

    A1: ComplexMatrix
    A2: ComplexMatrix

    def __post_init__(self) -> None:
        a1, a2 = as_matrix(self.A1), as_matrix(self.A2)
        object.__setattr__(self, "A1", a1)
        object.__setattr__(self, "A2", a2)
        if require_square(a1) != require_square(a2):
            raise PreconditionError(
                f"Generators act on different spaces: {a1.shape} vs {a2.shape}.",
                precondition="same space",
            )
        bound = 1e-10 * (spectral_norm(a1) * spectral_norm(a2) + 1.0)
        residual = commutator_norm(a1, a2)
        if residual > bound:
            raise NotCommutingError(residual, bound)
        require_dissipative(a1)
        require_dissipative(a2)

    @property
    def dim(self) -> int:
        return int(self.A1.shape[0])

    def semigroups(self, s: float, t: float) -> tuple[ComplexMatrix, ComplexMatrix]:
        """``(T_1(s), T_2(t)) = (exp(s A1), exp(t A2))``."""

        return scipy.linalg.expm(s * self.A1), scipy.linalg.expm(t * self.A2)


@dataclass(frozen=True, eq=False)
class Cogenerator:
    """Contraction without eigenvalue ``1``; the cogenerator of a semigroup.

    Raises:
        NotAContractionError: If ``|T| > 1 + 1e-9``.
        EigenvalueOneError: If some eigenvalue lies within ``gap_tol`` of ``1``.
    """

    T: ComplexMatrix
    provenance: Literal["generator", "supplied"] = "supplied"
    gap_tol: float = GAP_TOL
    generator: Optional[ComplexMatrix] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        matrix = as_matrix(self.T)
        object.__setattr__(self, "T", matrix)
        require_contraction(matrix, EQUALITY_TOL)
        gap = eigenvalue_one_check(matrix, self.gap_tol)
        if not gap.passed:
            raise EigenvalueOneError(gap.distance, self.gap_tol, operator="cogenerator")

    @property
    def dim(self) -> int:
        return int(self.T.shape[0])

    def to_generator(self) -> ComplexMatrix:
        """Inverse Cayley transform ``(T + I)(T - I)^{-1}``."""

        eye = identity(self.dim)
        return _solve_resolvent(self.T - eye, self.T + eye)


def cogenerator_from_generator(generator: ComplexMatrix, gap_tol: TolLike = GAP_TOL) -> Cogenerator:
    """Cayley transform ``T = (A + I)(A - I)^{-1}`` of a dissipative generator.

    Raises:
        NotDissipativeError: When ``A + A*`` has a positive eigenvalue.
        SingularResolventError: When ``A - I`` is numerically singular.
    """

    matrix = as_matrix(generator)
    dim = require_square(matrix)
    require_dissipative(matrix)
    eye = identity(dim)
    cogenerator = _solve_resolvent(matrix - eye, matrix + eye)
    log.debug("cogenerator_from_generator: dim=%d |T|=%.6f", dim, spectral_norm(cogenerator))
    return Cogenerator(cogenerator, provenance="generator", gap_tol=resolve_tol(gap_tol), generator=matrix)


def phi_s_apply(matrix: ComplexMatrix, s: float) -> ComplexMatrix:
    """``phi_s(X) = (X - (1 - s) I)(X - (1 + s) I)^{-1}``.

    Raises:
        PreconditionError: For ``s <= 0``.
        SingularResolventError: When ``X - (1 + s) I`` is numerically singular.
    """

    if not s > 0:
        raise PreconditionError(f"phi_s needs s > 0, got {s!r}.", precondition="positive s")
    matrix = as_matrix(matrix)
    eye = identity(require_square(matrix))
    return _solve_resolvent(matrix - (1.0 + s) * eye, matrix - (1.0 - s) * eye)


def e_sr_apply(operator: ComplexMatrix, s: float, r: float, tol: TolLike = EQUALITY_TOL) -> ComplexMatrix:
    """``e_{s,r}(T) = exp(s (rT + I)(rT - I)^{-1})`` for a contraction ``T``."""

    if s < 0:
        raise PreconditionError(f"e_sr needs s >= 0, got {s!r}.", precondition="nonnegative s")
    if not 0 < r < 1:
        raise PreconditionError(f"e_sr needs r in (0, 1), got {r!r}.", precondition="radius in (0, 1)")
    matrix = as_matrix(operator)
    require_contraction(matrix, tol)
    eye = identity(matrix.shape[0])
    if s == 0:
        return eye
    scaled = r * matrix
    return scipy.linalg.expm(s * _solve_resolvent(scaled - eye, scaled + eye))


def e_s_apply(cogenerator: Cogenerator | ComplexMatrix, s: float) -> ComplexMatrix:
    """``e_s(T) = exp(s (T + I)(T - I)^{-1})``; equals ``exp(sA)`` when ``T`` came from ``A``.

    Raw matrices are validated as :class:`Cogenerator` first, so an eigenvalue
    near ``1`` raises :class:`~matcore.errors.EigenvalueOneError`.
    """

    if s < 0:
        raise PreconditionError(f"e_s needs s >= 0, got {s!r}.", precondition="nonnegative s")
    if not isinstance(cogenerator, Cogenerator):
        cogenerator = Cogenerator(cogenerator)
    if s == 0:
        return identity(cogenerator.dim)
    return scipy.linalg.expm(s * cogenerator.to_generator())


# ----------------------------------------------------------------------
# Convergence checks
# ----------------------------------------------------------------------
def _decreasing_check(name: str, errors: Sequence[float], floor: float) -> Check:
    """Strictly decreasing errors, or errors that are all negligible."""

    steps = [later - earlier for earlier, later in zip(errors, errors[1:])]
    worst_step = max(steps) if steps else 0.0
    negligible = all(error <= floor for error in errors)
    passed = negligible or all(step < 0 for step in steps)
    return Check(name, float(worst_step), 0.0, passed, {"errors": [float(e) for e in errors], "floor": floor})


def cogenerator_limit_check(generator: ComplexMatrix, s_values: Sequence[float] = LIMIT_S_VALUES) -> CheckReport:
    """Measure ``|phi_s(exp(sA)) - T|`` along a decreasing sequence of ``s``.

    The verdict asks for strictly decreasing errors and a final error at most
    ``1e-3 (1 + |A|^2)``. When every error is already at rounding level (the
    identity semigroup, say) monotonicity is not required.
    """

    values = [float(s) for s in s_values]
    if not values or any(s < MIN_S for s in values):
        raise PreconditionError(f"s values must be nonempty and >= {MIN_S}.", precondition="s range")
    if any(later >= earlier for earlier, later in zip(values, values[1:])):
        raise PreconditionError("s values must be strictly decreasing.", precondition="decreasing s")
    matrix = as_matrix(generator)
    cogenerator = cogenerator_from_generator(matrix)
    scale = spectral_norm(matrix)
    errors = [
        spectral_norm(phi_s_apply(scipy.linalg.expm(s * matrix), s) - cogenerator.T) for s in values
    ]
    log.debug("cogenerator_limit_check: errors=%s", errors)

    report = CheckReport("cogenerator_limit", data={"s_values": values, "errors": errors})
    report.add(_decreasing_check("phi_s_errors_decreasing", errors, EQUALITY_TOL * (1.0 + scale)))
    report.record("phi_s_final_error", errors[-1], 1e-3 * (1.0 + scale**2))
    return report


def cogenerator_commutation_check(
    generator_1: ComplexMatrix,
    generator_2: ComplexMatrix,
    s_values: Sequence[float] = LIMIT_S_VALUES,
) -> CheckReport:
    """Commuting generators give commuting ``phi_s(T_i(s))`` and commuting cogenerators."""

    pair = GeneratorPair(generator_1, generator_2)
    report = CheckReport("cogenerator_commutation", data={"s_values": [float(s) for s in s_values]})
    for s in s_values:
        first, second = pair.semigroups(s, s)
        x1, x2 = phi_s_apply(first, s), phi_s_apply(second, s)
        scale = max(1.0, spectral_norm(x1) * spectral_norm(x2))
        report.record(f"phi_s_commute[s={s:g}]", commutator_norm(x1, x2), 1e-9 * scale)
    t1 = cogenerator_from_generator(pair.A1).T
    t2 = cogenerator_from_generator(pair.A2).T
    report.record("cogenerators_commute", commutator_norm(t1, t2), 1e-10 * max(1.0, spectral_norm(t1) * spectral_norm(t2)))
    return report


def radial_limit_check(
    cogenerator: Cogenerator | ComplexMatrix,
    s: float,
    r_values: Sequence[float] = RADIAL_R_VALUES,
) -> CheckReport:
    """``e_{s,r}(T) -> e_s(T)`` as ``r -> 1-``, each term obeying the von Neumann bound."""

    if not isinstance(cogenerator, Cogenerator):
        cogenerator = Cogenerator(cogenerator)
    radii = [float(r) for r in r_values]
    if not radii or any(later <= earlier for earlier, later in zip(radii, radii[1:])):
        raise PreconditionError("r values must be nonempty and strictly increasing.", precondition="increasing r")
    target = e_s_apply(cogenerator, s)
    regularised = [e_sr_apply(cogenerator.T, s, r) for r in radii]
    errors = [spectral_norm(value - target) for value in regularised]
    norms = [spectral_norm(value) for value in regularised]

    report = CheckReport("radial_limit", data={"s": float(s), "r_values": radii, "errors": errors, "norms": norms})
    report.add(_decreasing_check("radial_errors_decreasing", errors, EQUALITY_TOL))
    report.record("von_neumann_bound", max(norms) - 1.0, EQUALITY_TOL)
    return report


__all__ = [
    "Cogenerator",
    "EigenvalueGap",
    "GAP_TOL",
    "GeneratorPair",
    "LIMIT_S_VALUES",
    "RADIAL_R_VALUES",
    "cogenerator_commutation_check",
    "cogenerator_from_generator",
    "cogenerator_limit_check",
    "e_s_apply",
    "e_sr_apply",
    "eigenvalue_one_check",
    "phi_s_apply",
    "radial_limit_check",
    "require_dissipative",
]
