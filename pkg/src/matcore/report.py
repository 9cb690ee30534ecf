"""Named residual checks and the reports that collect them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional


@dataclass(frozen=True)
class Check:
    """One invariant evaluated numerically: a residual against a tolerance."""

    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def at_most(cls, name: str, residual: float, tolerance: float, **detail: Any) -> "Check":
        """Passing iff ``residual <= tolerance``. NaN residuals always fail."""

        residual = float(residual)
        passed = not math.isnan(residual) and residual <= tolerance
        return cls(name, residual, float(tolerance), passed, dict(detail))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": dict(self.detail),
        }


@dataclass
class CheckReport:
    """Ordered collection of :class:`Check` records plus free-form data.

    ``data`` holds values worth keeping next to the verdict (error sequences,
    dimensions, the tested index set) and must stay JSON friendly.
    """

    subject: str
    checks: List[Check] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def record(self, name: str, residual: float, tolerance: float, **detail: Any) -> Check:
        return self.add(Check.at_most(name, residual, tolerance, **detail))

    def extend(self, other: "CheckReport", prefix: Optional[str] = None) -> None:
        """Append ``other``'s checks, optionally prefixing their names."""

        for check in other.checks:
            name = f"{prefix}.{check.name}" if prefix else check.name
            self.checks.append(Check(name, check.residual, check.tolerance, check.passed, dict(check.detail)))

    def check(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(f"No check named '{name}' in report '{self.subject}'")

    def residual(self, name: str) -> float:
        return self.check(name).residual

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def __bool__(self) -> bool:
        return self.passed

    def __iter__(self) -> Iterator[Check]:
        return iter(self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            "data": dict(self.data),
        }


__all__ = ["Check", "CheckReport"]
