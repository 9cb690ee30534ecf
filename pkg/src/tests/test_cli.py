"""Tests for the Typer based dilation workbench CLI."""
from __future__ import annotations

import json
import pathlib
import sys
from pathlib import Path
from typing import Any

ROOT = pathlib.Path(__file__).resolve().parents[2]
SRC = ROOT / "src"
for candidate in (ROOT, SRC):
    path_str = str(candidate)
    if path_str not in sys.path:
        sys.path.insert(0, path_str)

import numpy as np
import pytest

from typer.testing import CliRunner
from cli.config import Scenario
from cli.main import app
from cli.scenarios import run_scenario


runner = CliRunner()

NILPOTENT = [[0, 0.9], [0, 0]]


def _write(path: Path, payload: Any) -> Path:
    path.write_text(json.dumps(payload))
    return path


def _run(*args: str, expected_code: int = 0) -> str:
    result = runner.invoke(app, [*args, "--log-level", "ERROR"])
    assert result.exit_code == expected_code, result.stdout
    return result.stdout.strip()


def test_dilate_zero_contraction(tmp_path: Path) -> None:
    config = _write(tmp_path / "schaffer.json", {"matrices": {"T": [[0.0]]}})
    report = json.loads(_run("dilate", "--config", str(config), "--depth", "3"))
    assert report["verdict"] == "pass"
    names = {check["name"] for check in report["checks"]}
    assert names == {"schaffer.compression", "schaffer.isometry_interior"}
    assert report["data"]["schaffer"]["dim_k"] == 4


def test_brehmer_expected_failure_exits_zero(tmp_path: Path) -> None:
    config = _write(
        tmp_path / "brehmer.json",
        {"kind": "brehmer", "matrices": {"T1": NILPOTENT, "T2": NILPOTENT}, "expected_verdict": "fail"},
    )
    report = json.loads(_run("brehmer", "--config", str(config)))
    assert report["verdict"] == "fail"
    assert report["data"]["brehmer"]["min_eigenvalue"] == pytest.approx(-0.62, abs=1e-9)
    agreement = [check for check in report["checks"] if check["name"].startswith("kernel_agreement.")]
    assert agreement and all(check["passed"] for check in agreement)


def test_unexpected_verdict_exits_one(tmp_path: Path) -> None:
    config = _write(tmp_path / "brehmer.json", {"matrices": {"T1": NILPOTENT, "T2": NILPOTENT}})
    _run("brehmer", "--config", str(config), expected_code=1)


def test_scalar_pipeline(tmp_path: Path) -> None:
    config = _write(tmp_path / "pipeline.json", {"kind": "continuous", "matrices": {"A1": [[-1.0]], "A2": [[-2.0]]}})
    report = json.loads(_run("pipeline", "--config", str(config)))
    assert report["verdict"] == "pass"
    residuals = report["data"]["continuous_dilation"]["residuals"]
    assert len(residuals) == 2
    assert max(residuals) <= 0.05


def test_same_seed_gives_same_digest(tmp_path: Path) -> None:
    out = tmp_path / "reports" / "ando.json"
    first = json.loads(_run("ando", "--seed", "3", "--dim", "2", "--depth", "3", "--out", str(out)))
    second = json.loads(_run("ando", "--seed", "3", "--dim", "2", "--depth", "3"))
    assert first["digest"] == second["digest"]
    assert first["verdict"] == "pass"
    assert json.loads(out.read_text())["digest"] == first["digest"]

    summary = runner.invoke(app, ["report", str(out)])
    assert summary.exit_code == 0
    assert summary.stdout.startswith("ando: pass")
    assert first["digest"][:12] in summary.stdout


def test_csv_output(tmp_path: Path) -> None:
    lines = _run("ando", "--seed", "1", "--depth", "2", "--csv").splitlines()
    assert lines[0] == "name,residual,tolerance,passed"
    assert any(line.startswith("ando.commutation,") for line in lines[1:])


@pytest.mark.parametrize(
    "payload",
    [
        {"dim": 100},
        {"kind": "brehmer"},
        {"unknown_field": 1},
        {"bases": ["0"]},
        {"matrices": {"T1": [[1.0, 2.0], [3.0]]}},
    ],
)
def test_bad_config_exits_two(tmp_path: Path, payload: dict) -> None:
    config = _write(tmp_path / "bad.json", payload)
    _run("ando", "--config", str(config), expected_code=2)


def test_missing_config_exits_two(tmp_path: Path) -> None:
    _run("ando", "--config", str(tmp_path / "absent.json"), expected_code=2)


def test_library_errors_exit_two(tmp_path: Path) -> None:
    config = _write(tmp_path / "naimark.json", {"matrices": {"T1": NILPOTENT, "T2": NILPOTENT}})
    _run("naimark", "--config", str(config), expected_code=2)


def test_run_scenario_naimark_oracle() -> None:
    scenario = Scenario(kind="ando", generator="doubly_commuting", dim=4, depth=2, seed=0)
    report = run_scenario(scenario)
    assert report.passed
    assert "naimark_oracle.compression_agreement" in {check.name for check in report.checks}


def test_run_scenario_hunt_records_every_trial() -> None:
    report = run_scenario(Scenario(kind="hunt", trials=5, seed=2))
    assert report.passed
    assert len(report.checks) == 5
    assert len(report.data["hunt"]["min_eigenvalues"]) == 5


def test_theorem21_kind_runs_the_continuous_pipeline(tmp_path: Path) -> None:
    config = _write(
        tmp_path / "theorem21.json",
        {"kind": "theorem21", "matrices": {"A1": [[-1.0]], "A2": [[-2.0]]}, "depths": [6, 8]},
    )
    report = json.loads(_run("pipeline", "--config", str(config)))
    assert report["verdict"] == "pass"
    assert report["scenario"]["kind"] == "theorem21"
    assert report["data"]["continuous_dilation"]["depths"] == [6, 8]
    assert max(report["data"]["continuous_dilation"]["residuals"]) <= 0.05


def test_lemma22_kind_runs_the_reduction(tmp_path: Path) -> None:
    config = _write(
        tmp_path / "lemma22.json",
        {"kind": "lemma22", "matrices": {"T1": [[0.5, 0.0], [0.0, -0.3]], "T2": [[0.2, 0.0], [0.0, 0.4]]}, "depth": 3},
    )
    report = json.loads(_run("reduce", "--config", str(config)))
    assert report["verdict"] == "pass"
    assert report["scenario"]["kind"] == "lemma22"
    names = {check["name"] for check in report["checks"]}
    assert {"fixed_vectors.w1_z", "fixed_vectors.offdiag_v1", "fixed_vectors.compression_preserved"} <= names
    fixed = report["data"]["fixed_vectors"]
    assert fixed["dim_before"] == fixed["dim_after"]


def test_alias_does_not_cross_pipelines(tmp_path: Path) -> None:
    config = _write(tmp_path / "theorem21.json", {"kind": "theorem21"})
    _run("reduce", "--config", str(config), expected_code=2)


def test_brehmer_empty_scan_emits_null(tmp_path: Path) -> None:
    config = _write(tmp_path / "brehmer.json", {"matrices": {"T1": [[0.5]], "T2": [[0.5]]}})
    output = _run("brehmer", "--config", str(config), "--depth", "0")
    assert "Infinity" not in output
    scan = json.loads(output)["data"]["brehmer_scan"]
    assert scan["tested"] == []
    assert scan["min_eigenvalue"] is None


def test_linalg_errors_exit_two(monkeypatch: pytest.MonkeyPatch) -> None:
    def _singular(scenario: Scenario) -> None:
        raise np.linalg.LinAlgError("Singular matrix")

    monkeypatch.setattr("cli.main.run_scenario", _singular)
    result = runner.invoke(app, ["ando", "--log-level", "CRITICAL"])
    assert result.exit_code == 2
