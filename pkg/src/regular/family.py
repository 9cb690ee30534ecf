"""Commuting contraction families indexed by a commensurable semigroup.

A family is given by one generator per coordinate ``j``: an element
``base_j · e_j`` of ``S`` and a contraction ``T_j``. Every ``s`` in the lattice
spanned by the generators then evaluates to ``T_s = Π_j T_j^{s(j) / base_j}``,
so the semigroup law holds exactly.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from index import IndexElement, LatticeReduction, SubsetMask, mask, pos_neg_parts
from matcore import (
    EQUALITY_TOL,
    CheckReport,
    ComplexMatrix,
    PsdVerdict,
    TolLike,
    adjoint,
    as_matrix,
    commutator_norm,
    hermitian_part,
    identity,
    matrix_to_json,
    psd_check,
    require_contraction,
    require_square,
    resolve_tol,
    spectral_norm,
)
from matcore.errors import LatticeError, NotCommutingError, PreconditionError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

MAX_SUBSET = 20
COMMUTE_TOL = 1e-10
DOUBLY_COMMUTING_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SemigroupFamily:
    """Contractive semigroup ``{T_s}`` generated by commuting contractions.

    Raises:
        NotAContractionError: If a generator operator has norm above ``1 + 1e-9``.
        NotCommutingError: If two generator operators fail to commute.
        LatticeError: If generator elements are not distinct positive
            multiples of coordinate vectors.
    """

    generators: Tuple[IndexElement, ...]
    operators: Tuple[ComplexMatrix, ...]

    def __post_init__(self) -> None:
        operators = tuple(as_matrix(op) for op in self.operators)
        object.__setattr__(self, "operators", operators)
        object.__setattr__(self, "generators", tuple(self.generators))
        if not operators or len(operators) != len(self.generators):
            raise PreconditionError(
                "A family needs one operator per generator and at least one generator.",
                precondition="generators match operators",
            )
        dims = {require_square(op) for op in operators}
        if len(dims) != 1:
            raise PreconditionError(f"Generator operators act on different spaces: {sorted(dims)}.", precondition="same space")
        omega = self.generators[0].omega_size
        seen: set[int] = set()
        for element in self.generators:
            support = element.support()
            if element.omega_size != omega or len(support) != 1 or element[support[0]] <= 0:
                raise LatticeError(f"Generator {element} must be a positive multiple of a coordinate vector.")
            if support[0] in seen:
                raise LatticeError(f"Two generators share coordinate {support[0]}.")
            seen.add(support[0])
        norms = [require_contraction(op, EQUALITY_TOL) for op in operators]
        for (i, first), (j, second) in itertools.combinations(enumerate(operators), 2):
            bound = COMMUTE_TOL * max(1.0, norms[i] * norms[j])
            residual = commutator_norm(first, second)
            if residual > bound:
                raise NotCommutingError(residual, bound)

    @classmethod
    def from_operators(
        cls,
        operators: Sequence[ComplexMatrix],
        bases: Optional[Sequence[Fraction | int | str]] = None,
    ) -> "SemigroupFamily":
        """Family over ``Ω = {0, ..., k-1}`` with generator ``base_j · e_j`` for operator ``j``."""

        count = len(operators)
        bases = [1] * count if bases is None else list(bases)
        generators = tuple(IndexElement.unit(count, j, bases[j]) for j in range(count))
        return cls(generators, tuple(operators))

    # ------------------------------------------------------------------
    @property
    def omega_size(self) -> int:
        return self.generators[0].omega_size

    @property
    def dim(self) -> int:
        return int(self.operators[0].shape[0])

    @property
    def coordinates(self) -> Tuple[int, ...]:
        return tuple(g.support()[0] for g in self.generators)

    @property
    def lattice(self) -> LatticeReduction:
        bases = [Fraction(1)] * self.omega_size
        for coordinate, generator in zip(self.coordinates, self.generators):
            bases[coordinate] = generator[coordinate]
        return LatticeReduction(tuple(bases), ())

    def exponents(self, s: IndexElement) -> Tuple[int, ...]:
        """Integer exponent of each generator in ``s``; any sign.

        Raises:
            LatticeError: If ``s`` is off the lattice or uses a coordinate with no generator.
        """

        if s.omega_size != self.omega_size:
            raise LatticeError(f"{s} does not live on Ω of size {self.omega_size}.")
        unused = set(s.support()) - set(self.coordinates)
        if unused:
            raise LatticeError(f"{s} uses coordinates {sorted(unused)} that carry no generator.")
        integers = self.lattice.integers(s)
        return tuple(integers[c] for c in self.coordinates)

    def evaluate(self, s: IndexElement) -> ComplexMatrix:
        """``T_s`` for ``s`` in ``S``."""

        if not s.in_semigroup():
            raise LatticeError(f"evaluate needs an element of S, got {s}.")
        result = identity(self.dim)
        for power, operator in zip(self.exponents(s), self.operators):
            if power:
                result = result @ np.linalg.matrix_power(operator, power)
        return result

    def adjoint_family(self) -> "SemigroupFamily":
        """``T* = {T_s*}``; commuting generators give commuting adjoints."""

        return SemigroupFamily(self.generators, tuple(adjoint(op) for op in self.operators))

    def to_json(self) -> Dict[str, object]:
        return {
            "generators": [g.to_json() for g in self.generators],
            "operators": [matrix_to_json(op) for op in self.operators],
        }


# ----------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------
def t_hat(family: SemigroupFamily, g: IndexElement) -> ComplexMatrix:
    """``T^(g) = T_{g-}* T_{g+}`` for ``g`` in ``S - S``."""

    plus, minus = pos_neg_parts(g)
    return adjoint(family.evaluate(minus)) @ family.evaluate(plus)


def brehmer_sum(family: SemigroupFamily, s: IndexElement, v: SubsetMask) -> ComplexMatrix:
    """``Σ_{u ⊆ v} (-1)^{|u|} T_{s[u]}* T_{s[u]}``."""

    if len(v) > MAX_SUBSET:
        raise PreconditionError(
            f"|v| = {len(v)} exceeds the limit of {MAX_SUBSET} coordinates.",
            precondition="|v| <= 20",
        )
    if not s.in_semigroup():
        raise LatticeError(f"The Brehmer condition is posed for s in S, got {s}.")
    total = np.zeros((family.dim, family.dim), dtype=np.complex128)
    for u in v.subsets():
        value = family.evaluate(mask(s, u))
        total += (-1) ** len(u) * (adjoint(value) @ value)
    return hermitian_part(total)


def brehmer_check(
    family: SemigroupFamily,
    s: IndexElement,
    v: SubsetMask,
    tol: TolLike = EQUALITY_TOL,
) -> CheckReport:
    """Positivity of the alternating sum for one ``(s, v)``.

    The single check's residual is ``-lambda_min``, so it passes iff
    ``lambda_min >= -tol``; ``data`` carries ``lambda_min`` itself.
    """

    verdict = psd_check(brehmer_sum(family, s, v), tol)
    report = CheckReport("brehmer", data={"s": s.to_json(), "v": list(v.members), "min_eigenvalue": verdict.min_eigenvalue})
    report.record(f"brehmer[s={s}, v={list(v.members)}]", -verdict.min_eigenvalue, resolve_tol(tol))
    return report


def brehmer_scan(family: SemigroupFamily, box: Sequence[IndexElement], tol: TolLike = EQUALITY_TOL) -> CheckReport:
    """Run :func:`brehmer_check` for every ``s`` in ``box ∩ S`` and nonempty ``v ⊆ support(s)``."""

    report = CheckReport("brehmer_scan")
    tested: List[Dict[str, object]] = []
    lowest = float("inf")
    for s in box:
        if not s.in_semigroup() or s.is_zero():
            continue
        for v in SubsetMask(s.omega_size, s.support()).subsets():
            if not len(v):
                continue
            single = brehmer_check(family, s, v, tol)
            report.extend(single)
            lowest = min(lowest, single.data["min_eigenvalue"])
            tested.append({"s": s.to_json(), "v": list(v.members)})
    # None when the box holds no nonzero point of S.
    report.data.update({"tested": tested, "min_eigenvalue": lowest if tested else None})
    return report


def doubly_commuting_check(family: SemigroupFamily, tol: TolLike = DOUBLY_COMMUTING_TOL) -> CheckReport:
    """``max_{i != j} |T_j T_i* - T_i* T_j|`` against ``tol · max(1, max |T|^2)``."""

    if len(family.operators) < 2:
        raise PreconditionError("Doubly commuting needs at least two generators.", precondition=">= 2 generators")
    worst = 0.0
    for first, second in itertools.permutations(family.operators, 2):
        worst = max(worst, spectral_norm(second @ adjoint(first) - adjoint(first) @ second))
    scale = max(1.0, max(spectral_norm(op) for op in family.operators) ** 2)
    report = CheckReport("doubly_commuting")
    report.record("doubly_commuting", worst, resolve_tol(tol) * scale)
    return report


def kernel_gram(
    family: SemigroupFamily,
    box: Sequence[IndexElement],
    tol: TolLike = EQUALITY_TOL,
) -> Tuple[ComplexMatrix, PsdVerdict]:
    """Block matrix ``[T^(t - s)]_{s, t in box}`` and its PSD verdict."""

    size = family.dim
    gram = np.zeros((len(box) * size, len(box) * size), dtype=np.complex128)
    cache: Dict[IndexElement, ComplexMatrix] = {}
    for row, s in enumerate(box):
        for col, t in enumerate(box):
            difference = t - s
            if difference not in cache:
                cache[difference] = t_hat(family, difference)
            gram[row * size : (row + 1) * size, col * size : (col + 1) * size] = cache[difference]
    verdict = psd_check(gram, tol)
    log.debug("kernel_gram: %d points, lambda_min=%.3e", len(box), verdict.min_eigenvalue)
    return gram, verdict


__all__ = [
    "DOUBLY_COMMUTING_TOL",
    "MAX_SUBSET",
    "SemigroupFamily",
    "brehmer_check",
    "brehmer_scan",
    "brehmer_sum",
    "doubly_commuting_check",
    "kernel_gram",
    "t_hat",
]
