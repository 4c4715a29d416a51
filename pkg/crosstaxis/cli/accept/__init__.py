"""Acceptance suite for the crosstaxis CLI."""

from .criteria import CRITERIA, AcceptanceSettings, CriterionResult
from .main import ACCEPTANCE_FILE, run_acceptance, run_criterion

__all__ = [
    "ACCEPTANCE_FILE",
    "CRITERIA",
    "AcceptanceSettings",
    "CriterionResult",
    "run_acceptance",
    "run_criterion",
]
