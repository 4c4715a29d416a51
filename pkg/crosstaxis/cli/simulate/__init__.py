"""Single experiment runs for the crosstaxis CLI."""

from .main import ExperimentResult, resolve_weights, run_simulate, stage

__all__ = [
    "ExperimentResult",
    "resolve_weights",
    "run_simulate",
    "stage",
]
