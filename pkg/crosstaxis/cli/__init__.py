"""CLI module for crosstaxis - experiment commands and utilities."""

from .accept import AcceptanceSettings, run_acceptance
from .fit import run_fit
from .inequalities import run_inequalities
from .simulate import ExperimentResult, run_simulate
from .sweep import SweepRow, run_sweep
from .utils import TimingMetrics, print_blue, print_red, print_result

__all__ = [
    # Commands
    "run_simulate",
    "run_sweep",
    "run_inequalities",
    "run_fit",
    "run_acceptance",
    # Results and settings
    "AcceptanceSettings",
    "ExperimentResult",
    "SweepRow",
    # Utils
    "TimingMetrics",
    "print_blue",
    "print_red",
    "print_result",
]
