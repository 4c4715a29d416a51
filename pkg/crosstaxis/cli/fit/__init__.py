"""Offline decay fits for the crosstaxis CLI."""

from .main import run_fit

__all__ = ["run_fit"]
