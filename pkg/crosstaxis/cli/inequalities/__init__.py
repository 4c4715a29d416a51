"""Inequality campaigns for the crosstaxis CLI."""

from .main import run_inequalities

__all__ = ["run_inequalities"]
