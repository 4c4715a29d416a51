import logging
from abc import ABC, abstractmethod
from collections.abc import Callable

import numpy as np

from crosstaxis.errors import StepRejected
from crosstaxis.grid import Grid, apply_taxis_divergence, face_differences
from crosstaxis.model import Parameters, reaction
from crosstaxis.solver.linear import DiffusionSolver
from crosstaxis.solver.state import SimState, StepControl

logger = logging.getLogger("crosstaxis")

# forcing(t) -> (source for u, source for v)
Forcing = Callable[[float], tuple[np.ndarray, np.ndarray]]


def max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


class Stepper(ABC):
    """Abstract base class for one-step integrators of the taxis system.

    Implementations advance raw arrays; ``step`` wraps that with the
    stability guard, clipping and bookkeeping shared by every scheme.
    """

    def __init__(self, p: Parameters, ctl: StepControl, grid: Grid):
        self.p = p
        self.ctl = ctl
        self.grid = grid
        self.clipped_mass = 0.0
        self.min_spacing = min(grid.spacing)

    @abstractmethod
    def advance(
        self,
        u: np.ndarray,
        v: np.ndarray,
        t: float,
        forcing: Forcing | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Advance (u, v) from t to t + dt without clipping."""

    def _diffusion_solvers(
        self, coefficient: float
    ) -> tuple[DiffusionSolver, DiffusionSolver]:
        return (
            DiffusionSolver(
                self.grid,
                coefficient * self.p.D1,
                rtol=self.ctl.cg_rtol,
                maxiter=self.ctl.cg_maxiter,
            ),
            DiffusionSolver(
                self.grid,
                coefficient * self.p.D2,
                rtol=self.ctl.cg_rtol,
                maxiter=self.ctl.cg_maxiter,
            ),
        )

    def taxis_rates(
        self, u: np.ndarray, v: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """(-chi1 div(u grad v), chi2 div(v grad u))."""
        return (
            -self.p.chi1 * apply_taxis_divergence(u, v, self.grid),
            self.p.chi2 * apply_taxis_divergence(v, u, self.grid),
        )

    def reaction_rates(
        self, u: np.ndarray, v: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        return reaction(self.p, u, v)

    def cfl_number(self, u: np.ndarray, v: np.ndarray) -> float:
        """dt / h times the largest taxis velocity of either species."""
        grad_u = grad_v = 0.0
        for axis, h in enumerate(self.grid.spacing):
            grad_u = max(grad_u, max_abs(face_differences(u, axis, h)))
            grad_v = max(grad_v, max_abs(face_differences(v, axis, h)))
        velocity = max(self.p.chi1 * grad_v, self.p.chi2 * grad_u)
        return velocity * self.ctl.dt / self.min_spacing

    def check_stability(self, u: np.ndarray, v: np.ndarray) -> None:
        cfl = self.cfl_number(u, v)
        if cfl > self.ctl.stability_guard:
            suggested = self.ctl.dt * self.ctl.stability_guard / cfl
            raise StepRejected(cfl, self.ctl.stability_guard, suggested)

    def clip(self, values: np.ndarray, t: float, name: str) -> np.ndarray:
        negative = values < 0
        if not negative.any():
            return values
        removed = -float(np.sum(values[negative])) * self.grid.cell_volume
        if not self.ctl.clip_negative:
            logger.warning(
                f"{name} has negative mass {removed:.3e} at t={t:.6g} "
                "(clipping disabled)"
            )
            return values
        self.clipped_mass += removed
        logger.warning(f"Clipped mass {removed:.3e} from {name} at t={t:.6g}")
        return np.maximum(values, 0.0)

    def step_arrays(
        self,
        u: np.ndarray,
        v: np.ndarray,
        t: float,
        forcing: Forcing | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        self.check_stability(u, v)
        u_new, v_new = self.advance(u, v, t, forcing)
        t_new = t + self.ctl.dt
        return self.clip(u_new, t_new, "u"), self.clip(v_new, t_new, "v")

    def step(
        self, state: SimState, forcing: Forcing | None = None
    ) -> SimState:
        u, v = self.step_arrays(
            state.u.values, state.v.values, state.t, forcing
        )
        return SimState.from_arrays(self.grid, u, v, state.t + self.ctl.dt)
