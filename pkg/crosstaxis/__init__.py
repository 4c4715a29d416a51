from .config import ExperimentConfig, load_config
from .grid import Field, Grid
from .model import (
    Parameters,
    Regime,
    RegimeTag,
    SteadyState,
    classify_regime,
    steady_state,
)
from .solver import select_stepper, simulate

__all__ = [
    # Config
    "ExperimentConfig",
    "load_config",
    # Model
    "Parameters",
    "Regime",
    "RegimeTag",
    "SteadyState",
    "classify_regime",
    "steady_state",
    # Grid
    "Field",
    "Grid",
    # Solver
    "select_stepper",
    "simulate",
]
