"""IMEX schemes: implicit diffusion, explicit taxis and reaction."""

import logging
import math

import numpy as np

from crosstaxis.grid import Grid
from crosstaxis.model import Parameters
from crosstaxis.solver.base import Forcing, Stepper, max_abs
from crosstaxis.solver.state import StepControl

logger = logging.getLogger("crosstaxis")

# Diagonal coefficient of the two-stage L-stable SDIRK method
SDIRK_GAMMA = 1.0 - 1.0 / math.sqrt(2.0)

# Largest accepted rate * step of one classical Runge-Kutta substep; the
# method is non-expansive on the imaginary axis up to 2 sqrt(2)
RK4_STEP_LIMIT = 2.5


class ImexEulerStepper(Stepper):
    """Backward Euler diffusion with forward Euler taxis and reaction.

    (I - dt D Lap) u_new = u + dt (taxis + reaction + forcing)
    """

    def __init__(self, p: Parameters, ctl: StepControl, grid: Grid):
        super().__init__(p, ctl, grid)
        self.solve_u, self.solve_v = self._diffusion_solvers(ctl.dt)

    def advance(
        self,
        u: np.ndarray,
        v: np.ndarray,
        t: float,
        forcing: Forcing | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        dt = self.ctl.dt
        taxis_u, taxis_v = self.taxis_rates(u, v)
        react_u, react_v = self.reaction_rates(u, v)
        rhs_u = u + dt * (taxis_u + react_u)
        rhs_v = v + dt * (taxis_v + react_v)
        if forcing is not None:
            source_u, source_v = forcing(t)
            rhs_u = rhs_u + dt * source_u
            rhs_v = rhs_v + dt * source_v
        return (
            self.solve_u.solve(rhs_u, guess=u),
            self.solve_v.solve(rhs_v, guess=v),
        )


class StrangImexStepper(Stepper):
    """Second-order symmetric splitting.

    reaction(dt/2) | diffusion(dt/2) taxis(dt) diffusion(dt/2) |
    reaction(dt/2). Reaction uses Heun's method and diffusion the two-stage
    L-stable SDIRK scheme. The taxis flow rotates u against v at a rate of
    the order of the Laplacian's spectral radius, so it is integrated with
    classical Runge-Kutta substeps that stay inside the method's stability
    interval on the imaginary axis.
    """

    def __init__(self, p: Parameters, ctl: StepControl, grid: Grid):
        super().__init__(p, ctl, grid)
        self.half = 0.5 * ctl.dt
        self.solve_u, self.solve_v = self._diffusion_solvers(
            SDIRK_GAMMA * self.half
        )
        self.laplacian_radius = sum(4.0 / h**2 for h in grid.spacing)

    def _heun(self, rates, u, v, tau):
        k1_u, k1_v = rates(u, v)
        u1 = u + tau * k1_u
        v1 = v + tau * k1_v
        k2_u, k2_v = rates(u1, v1)
        return (
            u + 0.5 * tau * (k1_u + k2_u),
            v + 0.5 * tau * (k1_v + k2_v),
        )

    def _rk4(self, rates, u, v, tau):
        k1_u, k1_v = rates(u, v)
        k2_u, k2_v = rates(u + 0.5 * tau * k1_u, v + 0.5 * tau * k1_v)
        k3_u, k3_v = rates(u + 0.5 * tau * k2_u, v + 0.5 * tau * k2_v)
        k4_u, k4_v = rates(u + tau * k3_u, v + tau * k3_v)
        return (
            u + tau / 6.0 * (k1_u + 2.0 * k2_u + 2.0 * k3_u + k4_u),
            v + tau / 6.0 * (k1_v + 2.0 * k2_v + 2.0 * k3_v + k4_v),
        )

    def taxis_substeps(self, u: np.ndarray, v: np.ndarray) -> int:
        """Runge-Kutta substeps needed to cover dt stably."""
        coupling = math.sqrt(
            self.p.chi1 * self.p.chi2 * max_abs(u) * max_abs(v)
        )
        advection = 2.0 * self.cfl_number(u, v) / self.ctl.dt
        rate = self.laplacian_radius * coupling + advection
        return max(1, math.ceil(self.ctl.dt * rate / RK4_STEP_LIMIT))

    def _sdirk(self, solver, y: np.ndarray) -> np.ndarray:
        stage = solver.solve(y, guess=y)
        # L applied to the first stage equals (stage - y) / (gamma tau)
        rhs = y + (1.0 - SDIRK_GAMMA) / SDIRK_GAMMA * (stage - y)
        return solver.solve(rhs, guess=stage)

    def _diffuse(self, u: np.ndarray, v: np.ndarray):
        return self._sdirk(self.solve_u, u), self._sdirk(self.solve_v, v)

    def advance(
        self,
        u: np.ndarray,
        v: np.ndarray,
        t: float,
        forcing: Forcing | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        dt = self.ctl.dt
        u, v = self._heun(self.reaction_rates, u, v, self.half)
        u, v = self._diffuse(u, v)

        taxis = self.taxis_rates
        if forcing is not None:
            source_u, source_v = forcing(t + self.half)

            def taxis(a, b):
                rate_a, rate_b = self.taxis_rates(a, b)
                return rate_a + source_u, rate_b + source_v

        substeps = self.taxis_substeps(u, v)
        logger.debug(f"Taxis flow in {substeps} substeps at t={t:.6g}")
        for _ in range(substeps):
            u, v = self._rk4(taxis, u, v, dt / substeps)
        u, v = self._diffuse(u, v)
        return self._heun(self.reaction_rates, u, v, self.half)


__all__ = ["ImexEulerStepper", "StrangImexStepper", "SDIRK_GAMMA"]
