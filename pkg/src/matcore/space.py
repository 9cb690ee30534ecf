"""Block decompositions of the dilation space ``K = H ⊕ ...``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import PreconditionError
from .matcore import ComplexMatrix


@dataclass(frozen=True)
class SpaceDecomposition:
    """Ordered orthogonal decomposition of a finite dimensional space.

    The first block is always the original space ``H``. Blocks may have
    dimension zero, which is how degenerate subspaces (an empty ``L_1``, say)
    are recorded.
    """

    names: Tuple[str, ...]
    dims: Tuple[int, ...]

    def __post_init__(self) -> None:
        names = tuple(self.names)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "dims", dims)
        if not names or names[0] != "H":
            raise PreconditionError("The first block must be labelled 'H'.", precondition="H first")
        if len(names) != len(dims):
            raise PreconditionError("Every block needs exactly one dimension.", precondition="matching blocks")
        if len(set(names)) != len(names):
            raise PreconditionError(f"Block names must be unique: {names}.", precondition="unique blocks")
        if any(d < 0 for d in dims):
            raise PreconditionError(f"Block dimensions must be nonnegative: {dims}.", precondition="nonnegative dims")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, int]]) -> "SpaceDecomposition":
        items = list(pairs)
        return cls(tuple(name for name, _ in items), tuple(dim for _, dim in items))

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def h_dim(self) -> int:
        return self.dims[0]

    def dim(self, name: str) -> int:
        return self.dims[self._position(name)]

    def offset(self, name: str) -> int:
        return sum(self.dims[: self._position(name)])

    def slice(self, name: str) -> slice:
        start = self.offset(name)
        return slice(start, start + self.dim(name))

    def indices(self, *names: str) -> np.ndarray:
        """Coordinate indices of the union of ``names``, in block order."""

        wanted = set(names)
        parts: List[np.ndarray] = [
            np.arange(self.offset(name), self.offset(name) + self.dim(name))
            for name in self.names
            if name in wanted
        ]
        missing = wanted - set(self.names)
        if missing:
            raise KeyError(f"Unknown blocks: {sorted(missing)}")
        return np.concatenate(parts) if parts else np.zeros(0, dtype=int)

    def block(self, matrix: ComplexMatrix, rows: Sequence[str], cols: Sequence[str]) -> ComplexMatrix:
        """Sub-matrix of ``matrix`` mapping the ``cols`` blocks into the ``rows`` blocks."""

        self._require_size(matrix)
        return matrix[np.ix_(self.indices(*rows), self.indices(*cols))]

    def embedding(self, name: str = "H") -> ComplexMatrix:
        """Isometric inclusion of block ``name`` into the full space."""

        columns = np.zeros((self.total_dim, self.dim(name)), dtype=np.complex128)
        columns[self.slice(name), :] = np.eye(self.dim(name))
        return columns

    def to_dict(self) -> Dict[str, List[object]]:
        return {"names": list(self.names), "dims": list(self.dims)}

    @classmethod
    def from_dict(cls, payload: Dict[str, List[object]]) -> "SpaceDecomposition":
        return cls(tuple(str(n) for n in payload["names"]), tuple(int(d) for d in payload["dims"]))  # type: ignore[arg-type]

    def _position(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError as exc:
            raise KeyError(f"Unknown block '{name}'") from exc

    def _require_size(self, matrix: ComplexMatrix) -> None:
        if matrix.shape != (self.total_dim, self.total_dim):
            raise PreconditionError(
                f"Operator shape {matrix.shape} does not match decomposition dimension {self.total_dim}.",
                precondition="decomposition dimension",
            )


__all__ = ["SpaceDecomposition"]
