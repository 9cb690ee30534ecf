"""Scenario reports: checks, verdicts and a provenance digest."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

from matcore import Check, CheckReport

CSV_FIELDS = ("name", "residual", "tolerance", "passed")


def _json_default(value: Any) -> Any:
    """JSON serializer for numpy scalars and arrays."""

    if hasattr(value, "tolist"):
        return value.tolist()
    raise TypeError(f"Object of type {type(value)!r} is not JSON serialisable")


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, default=_json_default)


@dataclass
class Report:
    """Outcome of one scenario run.

    The digest covers the scenario echo, the seed, the checks and the data;
    wall time is left out so that reruns of a scenario share a digest.
    """

    scenario: Dict[str, Any]
    seed: int
    checks: List[Check] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    expected_verdict: str = "pass"
    wall_time: float = 0.0

    @classmethod
    def from_reports(
        cls,
        scenario: Mapping[str, Any],
        reports: Iterable[CheckReport],
        *,
        seed: int,
        expected_verdict: str = "pass",
    ) -> "Report":
        """Merge library reports; each check is prefixed by its report's subject."""

        report = cls(dict(scenario), seed, expected_verdict=expected_verdict)
        for part in reports:
            report.add(part)
        return report

    def add(self, part: CheckReport) -> None:
        for check in part:
            self.checks.append(Check(f"{part.subject}.{check.name}", check.residual, check.tolerance, check.passed, dict(check.detail)))
        if part.data:
            self.data[part.subject] = dict(part.data)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def as_expected(self) -> bool:
        return self.verdict == self.expected_verdict

    @property
    def exit_code(self) -> int:
        return 0 if self.as_expected else 1

    def _content(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "checks": [check.to_dict() for check in self.checks],
            "data": self.data,
            "verdict": self.verdict,
            "expected_verdict": self.expected_verdict,
        }

    @property
    def digest(self) -> str:
        """SHA256 of the canonical JSON of everything except the wall time."""

        return hashlib.sha256(canonical_json(self._content()).encode("utf-8")).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        return {**self._content(), "digest": self.digest, "wall_time": self.wall_time}

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def save(self, path: Path | str) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.to_json())

    def to_csv(self) -> str:
        return residual_table(check.to_dict() for check in self.checks)

    def summary(self) -> str:
        failed = [check.name for check in self.checks if not check.passed]
        return (
            f"{self.scenario.get('kind', '?')}: {self.verdict} (expected {self.expected_verdict}), "
            f"{len(self.checks)} checks, {len(failed)} failed, digest {self.digest[:12]}"
        )

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "Report":
        checks = [
            Check(item["name"], float(item["residual"]), float(item["tolerance"]), bool(item["passed"]), dict(item.get("detail", {})))
            for item in payload.get("checks", [])
        ]
        return cls(
            scenario=dict(payload["scenario"]),
            seed=int(payload["seed"]),
            checks=checks,
            data=dict(payload.get("data", {})),
            expected_verdict=payload.get("expected_verdict", "pass"),
            wall_time=float(payload.get("wall_time", 0.0)),
        )

    @classmethod
    def load(cls, path: Path | str) -> "Report":
        return cls.from_dict(json.loads(Path(path).read_text()))


def residual_table(rows: Iterable[Mapping[str, Any]], fields: Optional[Iterable[str]] = None) -> str:
    """Flat CSV of residual rows with a header line."""

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fields or CSV_FIELDS), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


__all__ = ["CSV_FIELDS", "Report", "canonical_json", "residual_table"]
