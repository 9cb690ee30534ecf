"""Command line interface for the dilation workbench."""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np
import typer
from pydantic import ValidationError

from matcore import WorkbenchError

from .config import Scenario, ScenarioKind
from .report import Report
from .scenarios import run_scenario

log = logging.getLogger(__name__)

USAGE_EXIT = 2

app = typer.Typer(help="Construct, reduce and verify dilations of contraction matrices and semigroups.")


def _echo_json(payload: Any, *, err: bool = False) -> None:
    """Print ``payload`` as a JSON string."""

    typer.echo(json.dumps(payload, sort_keys=True), err=err)


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _fail(payload: Any) -> None:
    _echo_json(payload, err=True)
    raise typer.Exit(code=USAGE_EXIT)


def _execute(
    kind: ScenarioKind,
    config: Optional[Path],
    out: Optional[Path],
    csv: bool,
    log_level: str,
    **overrides: Any,
) -> None:
    _configure_logging(log_level)
    try:
        scenario = Scenario.load(kind, config, **overrides)
    except ValidationError as exc:
        _fail({"error": "ValidationError", "message": str(exc)})
    except (OSError, ValueError) as exc:
        _fail({"error": type(exc).__name__, "message": str(exc)})

    try:
        report = run_scenario(scenario)
    except WorkbenchError as exc:
        log.error("%s scenario failed: %s", kind, exc)
        _fail(exc.to_dict())
    except np.linalg.LinAlgError as exc:
        log.error("%s scenario failed in a linear solve: %s", kind, exc)
        _fail({"error": "LinAlgError", "message": str(exc)})

    if out is not None:
        report.save(out)
    if csv:
        typer.echo(report.to_csv(), nl=False)
    else:
        typer.echo(report.to_json())
    raise typer.Exit(code=report.exit_code)


# Shared options. Each command repeats them so typer can render per-command help.
CONFIG = typer.Option(None, "--config", help="JSON scenario file; keys mirror the scenario fields.")
SEED = typer.Option(None, "--seed", min=0, help="Seed for random instances and unitary completions.")
DIM = typer.Option(None, "--dim", help="Dimension of H for random instances.")
DEPTH = typer.Option(None, "--depth", help="Truncation depth N.")
TOL = typer.Option(None, "--tol", help="Equality tolerance.")
OUT = typer.Option(None, "--out", help="Write the JSON report to this path.")
CSV = typer.Option(False, "--csv", help="Print a flat residual table instead of JSON.")
LOG_LEVEL = typer.Option("WARNING", "--log-level", help="Logging level for stderr.")


@app.command("dilate")
def cmd_dilate(
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    dim: Optional[int] = DIM,
    depth: Optional[int] = DEPTH,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    csv: bool = CSV,
    log_level: str = LOG_LEVEL,
) -> None:
    """Truncated Schäffer dilation of one contraction."""

    _execute("schaffer", config, out, csv, log_level, seed=seed, dim=dim, depth=depth, tol=tol)


@app.command("ando")
def cmd_ando(
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    dim: Optional[int] = DIM,
    depth: Optional[int] = DEPTH,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    csv: bool = CSV,
    log_level: str = LOG_LEVEL,
) -> None:
    """Truncated commuting isometric dilation of a commuting pair."""

    _execute("ando", config, out, csv, log_level, seed=seed, dim=dim, depth=depth, tol=tol)


@app.command("reduce")
def cmd_reduce(
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    dim: Optional[int] = DIM,
    depth: Optional[int] = DEPTH,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    csv: bool = CSV,
    log_level: str = LOG_LEVEL,
) -> None:
    """Ando dilation followed by fixed-vector removal."""

    _execute("reduce", config, out, csv, log_level, seed=seed, dim=dim, depth=depth, tol=tol)


@app.command("pipeline")
def cmd_pipeline(
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    dim: Optional[int] = DIM,
    depth: Optional[int] = DEPTH,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    csv: bool = CSV,
    log_level: str = LOG_LEVEL,
) -> None:
    """Continuous pipeline: generators to commuting isometric semigroups.

    ``--depth`` runs a single depth instead of the configured ``depths``.
    """

    depths = None if depth is None else [depth]
    _execute("continuous", config, out, csv, log_level, seed=seed, dim=dim, depths=depths, tol=tol)


@app.command("brehmer")
def cmd_brehmer(
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    dim: Optional[int] = DIM,
    depth: Optional[int] = DEPTH,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    csv: bool = CSV,
    log_level: str = LOG_LEVEL,
) -> None:
    """Brehmer positivity checks; ``--depth`` sets the scanned box depth."""

    _execute("brehmer", config, out, csv, log_level, seed=seed, dim=dim, box_depth=depth, tol=tol)


@app.command("naimark")
def cmd_naimark(
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    dim: Optional[int] = DIM,
    depth: Optional[int] = DEPTH,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    csv: bool = CSV,
    log_level: str = LOG_LEVEL,
) -> None:
    """Regular unitary dilation on a lattice box; ``--depth`` sets the box depth."""

    _execute("naimark", config, out, csv, log_level, seed=seed, dim=dim, box_depth=depth, tol=tol)


@app.command("coisometric")
def cmd_coisometric(
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    dim: Optional[int] = DIM,
    depth: Optional[int] = DEPTH,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    csv: bool = CSV,
    log_level: str = LOG_LEVEL,
) -> None:
    """Coisometric family dilated through its adjoints; ``--depth`` sets the box depth."""

    _execute("coisometric", config, out, csv, log_level, seed=seed, dim=dim, box_depth=depth, tol=tol)


@app.command("hunt")
def cmd_hunt(
    config: Optional[Path] = CONFIG,
    seed: Optional[int] = SEED,
    dim: Optional[int] = DIM,
    trials: Optional[int] = typer.Option(None, "--trials", help="Number of random pairs to test."),
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    csv: bool = CSV,
    log_level: str = LOG_LEVEL,
) -> None:
    """Search random commuting pairs for Brehmer violations."""

    _execute("hunt", config, out, csv, log_level, seed=seed, dim=dim, trials=trials, tol=tol)


@app.command("report")
def cmd_report(
    path: Path = typer.Argument(..., help="JSON report written with --out."),
    csv: bool = CSV,
) -> None:
    """Render a saved report as a residual table or a one-line summary."""

    try:
        report = Report.load(path)
    except (OSError, ValueError, KeyError) as exc:
        _fail({"error": type(exc).__name__, "message": str(exc)})
    typer.echo(report.to_csv() if csv else report.summary(), nl=not csv)
    raise typer.Exit(code=report.exit_code)


if __name__ == "__main__":  # pragma: no cover - CLI entry point
    app()
