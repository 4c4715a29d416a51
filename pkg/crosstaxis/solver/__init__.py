from functools import lru_cache

from crosstaxis.grid import Grid
from crosstaxis.model import Parameters
from crosstaxis.solver.base import Forcing, Stepper
from crosstaxis.solver.imex import ImexEulerStepper, StrangImexStepper
from crosstaxis.solver.linear import DiffusionSolver
from crosstaxis.solver.perturbation import ModeSpec, perturb_steady_state
from crosstaxis.solver.simulate import simulate
from crosstaxis.solver.state import Scheme, SimState, StepControl, TimeSeries


def select_stepper(scheme: Scheme | str) -> type[Stepper]:
    """
    Select and return the stepper class implementing a scheme.

    Raises:
        ValueError: If the scheme is unsupported.
    """
    steppers = {
        Scheme.IMEX_EULER: ImexEulerStepper,
        Scheme.STRANG_IMEX: StrangImexStepper,
    }

    stepper_class = steppers.get(Scheme(scheme))
    if stepper_class is None:
        raise ValueError(f"Unsupported scheme: {scheme}")
    return stepper_class


STEPPER_CACHE_SIZE = 8


@lru_cache(maxsize=STEPPER_CACHE_SIZE)
def stepper_for(p: Parameters, ctl: StepControl, grid: Grid) -> Stepper:
    """Shared stepper for one (parameters, control, grid) triple.

    The diffusion factorizations are built once per triple. The stepper's
    ``clipped_mass`` accumulates over every call that shares it.
    """
    return select_stepper(ctl.scheme)(p, ctl, grid)


def step(
    state: SimState,
    p: Parameters,
    ctl: StepControl,
    forcing: Forcing | None = None,
) -> SimState:
    """Advance ``state`` by one step of ``ctl.scheme``."""
    return stepper_for(p, ctl, state.grid).step(state, forcing)


__all__ = [
    "DiffusionSolver",
    "Forcing",
    "ImexEulerStepper",
    "ModeSpec",
    "Scheme",
    "SimState",
    "StepControl",
    "Stepper",
    "StrangImexStepper",
    "TimeSeries",
    "perturb_steady_state",
    "select_stepper",
    "simulate",
    "step",
    "stepper_for",
]
