"""Seeded random instances for the scenario corpora."""
from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.stats import unitary_group

from cogen import GeneratorPair
from matcore import ComplexMatrix, adjoint, commutator_norm, identity, spectral_norm
from matcore.errors import NotCommutingError
from regular import SemigroupFamily

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

MARGIN = 0.05
COMMUTE_TOL = 1e-12


def _rng(seed: Optional[int] | np.random.Generator) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _rescale(matrix: ComplexMatrix, margin: float) -> ComplexMatrix:
    norm = spectral_norm(matrix)
    return matrix if norm == 0.0 else matrix * ((1.0 - margin) / norm)


def ginibre(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)


def random_contraction(dim: int, seed: Optional[int] | np.random.Generator = None, margin: float = MARGIN) -> ComplexMatrix:
    """Ginibre draw scaled to spectral norm ``1 - margin``."""

    return _rescale(ginibre(dim, _rng(seed)), margin)


def random_unitary(dim: int, seed: Optional[int] | np.random.Generator = None) -> ComplexMatrix:
    rng = _rng(seed)
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]], dtype=np.complex128)
    return np.asarray(unitary_group.rvs(dim, random_state=rng), dtype=np.complex128)


def gen_commuting_pair(
    dim: int,
    seed: Optional[int] | np.random.Generator = None,
    *,
    degree: int = 2,
    margin: float = MARGIN,
) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """``(p(S), q(S))`` for a random contraction ``S`` and random polynomials of degree ``<= degree``.

    Both outputs are rescaled to norm ``1 - margin``.

    Raises:
        NotCommutingError: If the outputs fail the ``1e-12`` commutation self-check.
    """

    rng = _rng(seed)
    base = random_contraction(dim, rng, margin)
    powers = [identity(dim)]
    for _ in range(degree):
        powers.append(powers[-1] @ base)

    def polynomial() -> ComplexMatrix:
        coefficients = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        return _rescale(sum(c * power for c, power in zip(coefficients, powers)), margin)

    first, second = polynomial(), polynomial()
    residual = commutator_norm(first, second)
    if residual > COMMUTE_TOL:
        raise NotCommutingError(residual, COMMUTE_TOL)
    return first, second


def gen_doubly_commuting(
    dim_a: int,
    dim_b: int,
    seed: Optional[int] | np.random.Generator = None,
    *,
    unitary_a: bool = False,
    margin: float = MARGIN,
) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """``(A ⊗ I, I ⊗ B)`` for random contractions ``A`` and ``B``."""

    rng = _rng(seed)
    a = random_unitary(dim_a, rng) if unitary_a else random_contraction(dim_a, rng, margin)
    b = random_contraction(dim_b, rng, margin)
    return np.kron(a, identity(dim_b)), np.kron(identity(dim_a), b)


def gen_commuting_unitaries(dim: int, seed: Optional[int] | np.random.Generator = None) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """Two unitaries diagonal in a common random eigenbasis."""

    rng = _rng(seed)
    basis = random_unitary(dim, rng)
    phases = np.exp(2j * np.pi * rng.random((2, dim)))
    return basis @ np.diag(phases[0]) @ adjoint(basis), basis @ np.diag(phases[1]) @ adjoint(basis)


def gen_generator_pair(dim: int, seed: Optional[int] | np.random.Generator = None, *, decay: float = 0.1) -> GeneratorPair:
    """Commuting normal generators with spectra in ``Re z <= -decay``."""

    rng = _rng(seed)
    basis = random_unitary(dim, rng)

    def spectrum() -> np.ndarray:
        return -(decay + rng.exponential(1.0, dim)) + 1j * rng.standard_normal(dim)

    first = basis @ np.diag(spectrum()) @ adjoint(basis)
    second = basis @ np.diag(spectrum()) @ adjoint(basis)
    return GeneratorPair(first, second)


def gen_family(kind: str, dim: int, seed: Optional[int] | np.random.Generator = None) -> SemigroupFamily:
    """Two-generator family over ``Ω = {0, 1}`` drawn from the named corpus.

    ``doubly_commuting`` splits ``dim`` as evenly as the factorisation allows;
    a prime ``dim`` uses a ``1 x dim`` split.
    """

    rng = _rng(seed)
    if kind == "commuting":
        operators = gen_commuting_pair(dim, rng)
    elif kind == "doubly_commuting":
        dim_a = max(d for d in range(1, int(np.sqrt(dim)) + 1) if dim % d == 0)
        operators = gen_doubly_commuting(dim_a, dim // dim_a, rng)
    elif kind == "unitary":
        operators = gen_commuting_unitaries(dim, rng)
    else:
        raise ValueError(f"Unknown instance generator '{kind}'.")
    log.debug("gen_family: kind=%s dim=%d", kind, dim)
    return SemigroupFamily.from_operators(operators)


__all__ = [
    "MARGIN",
    "gen_commuting_pair",
    "gen_commuting_unitaries",
    "gen_doubly_commuting",
    "gen_family",
    "gen_generator_pair",
    "random_contraction",
    "random_unitary",
]
