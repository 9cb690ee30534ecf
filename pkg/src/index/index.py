"""Exact rational arithmetic for the index semigroup ``S = Σ_i S_i``.

Each coordinate semigroup ``S_i`` is a rational ray ``r_i · Q_+``, and the
index set ``Ω = {0, ..., k-1}`` is finite. Elements are stored densely as
tuples of :class:`fractions.Fraction`, so every operation here is exact.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

from matcore.errors import LatticeError, PreconditionError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

Rational = Union[int, Fraction, str]


def _rational(value: Rational) -> Fraction:
    if isinstance(value, float):
        raise TypeError("Index coordinates must be exact; pass a Fraction, int or 'p/q' string.")
    return Fraction(value)


@dataclass(frozen=True)
class IndexElement:
    """Finitely supported rational function on ``Ω = {0, ..., omega_size - 1}``."""

    omega_size: int
    coords: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        coords = tuple(_rational(value) for value in self.coords)
        object.__setattr__(self, "coords", coords)
        if self.omega_size < 0 or len(coords) != self.omega_size:
            raise PreconditionError(
                f"Expected {self.omega_size} coordinates, got {len(coords)}.",
                precondition="coordinate count",
            )

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def of(cls, *values: Rational) -> "IndexElement":
        """Element with the given coordinates, e.g. ``IndexElement.of("1/2", "-1/3")``."""

        return cls(len(values), tuple(_rational(v) for v in values))

    @classmethod
    def zero(cls, omega_size: int) -> "IndexElement":
        return cls(omega_size, (Fraction(0),) * omega_size)

    @classmethod
    def unit(cls, omega_size: int, coordinate: int, value: Rational = 1) -> "IndexElement":
        """``e_j(value)``: ``value`` at ``coordinate`` and zero elsewhere."""

        if not 0 <= coordinate < omega_size:
            raise LatticeError(f"Coordinate {coordinate} is outside Ω of size {omega_size}.")
        coords = [Fraction(0)] * omega_size
        coords[coordinate] = _rational(value)
        return cls(omega_size, tuple(coords))

    @classmethod
    def from_mapping(cls, omega_size: int, coords: Mapping[int, Rational]) -> "IndexElement":
        values = [Fraction(0)] * omega_size
        for coordinate, value in coords.items():
            if not 0 <= int(coordinate) < omega_size:
                raise LatticeError(f"Coordinate {coordinate} is outside Ω of size {omega_size}.")
            values[int(coordinate)] = _rational(value)
        return cls(omega_size, tuple(values))

    # ------------------------------------------------------------------
    # Group structure
    # ------------------------------------------------------------------
    def _check_compatible(self, other: "IndexElement") -> None:
        if self.omega_size != other.omega_size:
            raise LatticeError(f"Index elements live on different Ω sizes: {self.omega_size} vs {other.omega_size}.")

    def __add__(self, other: "IndexElement") -> "IndexElement":
        self._check_compatible(other)
        return IndexElement(self.omega_size, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "IndexElement") -> "IndexElement":
        self._check_compatible(other)
        return IndexElement(self.omega_size, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "IndexElement":
        return IndexElement(self.omega_size, tuple(-a for a in self.coords))

    def __mul__(self, factor: Rational) -> "IndexElement":
        scalar = _rational(factor)
        return IndexElement(self.omega_size, tuple(scalar * a for a in self.coords))

    __rmul__ = __mul__

    def __getitem__(self, coordinate: int) -> Fraction:
        return self.coords[coordinate]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coords)

    def is_zero(self) -> bool:
        return all(value == 0 for value in self.coords)

    def in_semigroup(self) -> bool:
        """Membership in ``S``: every coordinate nonnegative."""

        return all(value >= 0 for value in self.coords)

    def support(self) -> Tuple[int, ...]:
        return tuple(j for j, value in enumerate(self.coords) if value != 0)

    def sort_key(self) -> Tuple[Fraction, ...]:
        return self.coords

    def __str__(self) -> str:
        return "(" + ", ".join(str(value) for value in self.coords) + ")"

    # ------------------------------------------------------------------
    # JSON
    # ------------------------------------------------------------------
    def to_json(self) -> Dict[str, Any]:
        """``{"omega": k, "coords": {"j": "p/q"}}`` listing nonzero coordinates."""

        return {
            "omega": self.omega_size,
            "coords": {
                str(j): f"{value.numerator}/{value.denominator}"
                for j, value in enumerate(self.coords)
                if value != 0
            },
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> "IndexElement":
        if set(payload) != {"omega", "coords"}:
            raise PreconditionError(
                f"IndexElement JSON needs exactly 'omega' and 'coords', got {sorted(payload)}.",
                precondition="index json fields",
            )
        coords = {int(key): Fraction(str(value)) for key, value in dict(payload["coords"]).items()}
        return cls.from_mapping(int(payload["omega"]), coords)


@dataclass(frozen=True)
class SubsetMask:
    """A finite subset ``u ⊆ Ω`` as a sorted tuple of coordinates."""

    omega_size: int
    members: Tuple[int, ...]

    def __post_init__(self) -> None:
        members = tuple(int(m) for m in self.members)
        if len(set(members)) != len(members):
            raise LatticeError(f"Subset {members} has duplicate coordinates.")
        if any(not 0 <= m < self.omega_size for m in members):
            raise LatticeError(f"Subset {members} is out of range for Ω of size {self.omega_size}.")
        object.__setattr__(self, "members", tuple(sorted(members)))

    @classmethod
    def full(cls, omega_size: int) -> "SubsetMask":
        return cls(omega_size, tuple(range(omega_size)))

    def complement(self) -> "SubsetMask":
        return SubsetMask(self.omega_size, tuple(j for j in range(self.omega_size) if j not in self.members))

    def subsets(self) -> Iterator["SubsetMask"]:
        """All ``2^|u|`` subsets, by increasing size."""

        for size in range(len(self.members) + 1):
            for chosen in itertools.combinations(self.members, size):
                yield SubsetMask(self.omega_size, chosen)

    def indicator(self) -> IndexElement:
        """``e[u]``: one on ``u`` and zero elsewhere."""

        return IndexElement.from_mapping(self.omega_size, {j: 1 for j in self.members})

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)


@dataclass(frozen=True)
class LatticeReduction:
    """Common per-coordinate bases ``s_0(j)`` and integer coordinates.

    ``coefficients[i][j] * bases[j] == elements[i][j]`` exactly.
    """

    bases: Tuple[Fraction, ...]
    coefficients: Tuple[Tuple[int, ...], ...]
    defaulted: Tuple[int, ...] = ()

    @property
    def omega_size(self) -> int:
        return len(self.bases)

    def integers(self, element: IndexElement) -> Tuple[int, ...]:
        """Integer lattice coordinates of ``element`` (any sign).

        Raises:
            LatticeError: When a coordinate is not an integer multiple of its base.
        """

        if element.omega_size != self.omega_size:
            raise LatticeError(f"Element {element} does not match Ω of size {self.omega_size}.")
        result: List[int] = []
        for j, (value, base) in enumerate(zip(element.coords, self.bases)):
            ratio = value / base
            if ratio.denominator != 1:
                raise LatticeError(
                    f"Coordinate {j} of {element} is not a multiple of the base {base}.",
                    element=element.to_json(),
                )
            result.append(int(ratio))
        return tuple(result)

    def element(self, integers: Sequence[int]) -> IndexElement:
        return IndexElement(self.omega_size, tuple(base * int(a) for base, a in zip(self.bases, integers)))


# ----------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------
def pos_neg_parts(g: IndexElement) -> Tuple[IndexElement, IndexElement]:
    """Return ``(s_+, s_-)`` with ``s_+(j) = max(0, g(j))`` and ``s_- = s_+ - g``."""

    plus = IndexElement(g.omega_size, tuple(max(Fraction(0), value) for value in g.coords))
    return plus, plus - g


def mask(s: IndexElement, u: SubsetMask) -> IndexElement:
    """``s[u] = e[u] · s``: keep the coordinates in ``u`` and zero the rest."""

    if u.omega_size != s.omega_size:
        raise LatticeError(f"Subset over Ω of size {u.omega_size} cannot mask an element over {s.omega_size}.")
    if not s.in_semigroup():
        raise LatticeError(f"mask expects an element of S, got {s}.")
    keep = set(u.members)
    return IndexElement(s.omega_size, tuple(value if j in keep else Fraction(0) for j, value in enumerate(s.coords)))


def _rational_gcd(values: Iterable[Fraction]) -> Fraction:
    values = list(values)
    denominator = math.lcm(*(v.denominator for v in values)) if values else 1
    numerator = math.gcd(*(int(v * denominator) for v in values)) if values else 0
    return Fraction(numerator, denominator)


def commensurable_reduce(elements: Sequence[IndexElement]) -> LatticeReduction:
    """Reduce elements of ``S`` to integer multiples of per-coordinate bases.

    ``s_0(j)`` is the rational gcd of the ``j``-th coordinates (gcd of the
    numerators over the lcm of the denominators). A coordinate that is zero
    across all inputs gets base ``1``, recorded in ``defaulted``.

    Raises:
        PreconditionError: On an empty input list.
        LatticeError: On negative coordinates or mismatched Ω sizes.
    """

    if not elements:
        raise PreconditionError("commensurable_reduce needs at least one element.", precondition="nonempty")
    omega = elements[0].omega_size
    for element in elements:
        if element.omega_size != omega:
            raise LatticeError("All elements must share the same Ω.")
        if not element.in_semigroup():
            raise LatticeError(f"Negative coordinate in {element}; commensurable_reduce works on S.")

    bases: List[Fraction] = []
    defaulted: List[int] = []
    for j in range(omega):
        base = _rational_gcd(element[j] for element in elements)
        if base == 0:
            log.warning("coordinate %d is zero across all inputs; defaulting its base to 1", j)
            base = Fraction(1)
            defaulted.append(j)
        bases.append(base)

    coefficients = tuple(
        tuple(int(element[j] / bases[j]) for j in range(omega)) for element in elements
    )
    log.debug("commensurable_reduce: bases=%s", [str(b) for b in bases])
    return LatticeReduction(tuple(bases), coefficients, tuple(defaulted))


def group_box(generators: Sequence[IndexElement], depth: int, *, signed: bool = False) -> List[IndexElement]:
    """Lattice points ``Σ c_j g_j`` with ``0 <= c_j <= depth``.

    With ``signed=True`` the coefficients range over ``[-depth, depth]`` and the
    box lies in ``S - S``. Duplicates are removed and the result is sorted
    lexicographically by coordinates.

    Raises:
        PreconditionError: For an empty generator list or negative depth.
        LatticeError: When a generator is not in ``S``.
    """

    if not generators:
        raise PreconditionError("group_box needs at least one generator.", precondition="nonempty generators")
    if depth < 0:
        raise PreconditionError(f"depth must be nonnegative, got {depth}.", precondition="nonnegative depth")
    omega = generators[0].omega_size
    for generator in generators:
        if generator.omega_size != omega or not generator.in_semigroup():
            raise LatticeError(f"Generator {generator} must be an element of S over Ω of size {omega}.")

    low = -depth if signed else 0
    points = set()
    for coefficients in itertools.product(range(low, depth + 1), repeat=len(generators)):
        point = IndexElement.zero(omega)
        for c, generator in zip(coefficients, generators):
            point = point + generator * c
        points.add(point)
    return sorted(points, key=IndexElement.sort_key)


__all__ = [
    "IndexElement",
    "LatticeReduction",
    "SubsetMask",
    "commensurable_reduce",
    "group_box",
    "mask",
    "pos_neg_parts",
]
