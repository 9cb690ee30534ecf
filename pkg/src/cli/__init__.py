"""Typer-based command line interface and scenario runner for the dilation workbench."""

from .config import Scenario, ToleranceConfig
from .main import app
from .report import Report
from .scenarios import run_scenario

__all__ = ["Report", "Scenario", "ToleranceConfig", "app", "run_scenario"]
