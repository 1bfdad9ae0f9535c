"""Command-line interface for shiplabel-qi."""

from shiplabel_qi.cli.main import main, run_cli

__all__ = ["main", "run_cli"]
