import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from crosstaxis.errors import PerturbationError
from crosstaxis.grid import Field, Grid, norms
from crosstaxis.inequalities import cosine_mode
from crosstaxis.model import Regime, RegimeTag, SteadyState
from crosstaxis.solver.state import SimState

logger = logging.getLogger("crosstaxis")

# Fraction of the W22 budget the scaled perturbation occupies
BUDGET_FRACTION = 1.0 - 1e-6
BUDGET_RTOL = 1e-10

_COMPONENTS = ("u", "v", "both")


@dataclass(frozen=True)
class ModeSpec:
    """One cosine mode of the initial perturbation.

    Attributes:
        indices: Mode index per axis; the mode is prod cos(pi k x / L).
        amplitude: Relative amplitude before the budget rescaling.
        component: Which species the mode perturbs: u, v or both.
    """

    indices: tuple[int, ...]
    amplitude: float = 1.0
    component: str = "both"

    def __post_init__(self) -> None:
        indices = tuple(int(k) for k in self.indices)
        if any(k < 0 for k in indices):
            raise PerturbationError(
                f"Mode indices must be >= 0, got {indices}"
            )
        if self.component not in _COMPONENTS:
            raise PerturbationError(
                f"Invalid mode component: {self.component}"
            )
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "amplitude", float(self.amplitude))

    @property
    def is_constant(self) -> bool:
        return all(k == 0 for k in self.indices)


def _check_modes(
    modes: Sequence[ModeSpec], grid: Grid, regime: Regime | None
) -> None:
    if not modes:
        raise PerturbationError("At least one perturbation mode is required")
    for mode in modes:
        if len(mode.indices) != grid.dim:
            raise PerturbationError(
                f"Mode {mode.indices} has {len(mode.indices)} indices, "
                f"grid has dimension {grid.dim}"
            )
        for k, n in zip(mode.indices, grid.points_per_axis):
            if k >= n:
                raise PerturbationError(
                    f"Mode index {k} reaches the Nyquist limit of {n} cells"
                )
        if (
            regime is not None
            and regime.tag is RegimeTag.H1
            and mode.is_constant
        ):
            raise PerturbationError(
                "Mode 0 would change the prescribed masses under H1"
            )


def _fold(delta: np.ndarray, name: str, fold_negative: bool) -> np.ndarray:
    low = float(np.min(delta))
    if low >= 0:
        return delta
    if not fold_negative:
        raise PerturbationError(
            f"Steady value of {name} is 0 and its perturbation goes "
            "negative; the budget is unattainable without clipping"
        )
    logger.info(f"Folding {name} perturbation by {-low:.3e} to stay >= 0")
    return delta - low


def perturb_steady_state(
    s: SteadyState,
    grid: Grid,
    epsilon: float,
    modes: Sequence[ModeSpec],
    seed: int = 0,
    regime: Regime | None = None,
    fold_negative: bool = True,
) -> SimState:
    """Initial data near ``s`` whose W22 distance sum equals a fixed budget.

    Each mode receives a seeded random coefficient of magnitude in [0.5, 1]
    and random sign per species. The combination is scaled so that
    ``w22(u - u*) + w22(v - v*) == epsilon * (1 - 1e-6)``.

    When a steady component is 0 its perturbation is shifted by its minimum
    (folded) so the initial field is nonnegative; with ``fold_negative``
    False that case raises instead.

    Raises:
        PerturbationError: On an invalid mode, a zero perturbation, or a
            budget that clipping makes unattainable.
    """
    if not epsilon > 0:
        raise PerturbationError(f"epsilon must be > 0, got {epsilon}")
    _check_modes(modes, grid, regime)

    rng = np.random.default_rng(seed)
    delta_u = np.zeros(grid.shape)
    delta_v = np.zeros(grid.shape)
    for mode in modes:
        coeff_u = rng.uniform(0.5, 1.0) * rng.choice((-1.0, 1.0))
        coeff_v = rng.uniform(0.5, 1.0) * rng.choice((-1.0, 1.0))
        shape = cosine_mode(grid, mode.indices)
        if mode.component in ("u", "both"):
            delta_u += mode.amplitude * coeff_u * shape
        if mode.component in ("v", "both"):
            delta_v += mode.amplitude * coeff_v * shape

    if regime is not None and regime.tag is RegimeTag.H1:
        if regime.trivial_u:
            delta_u[...] = 0.0
        if regime.trivial_v:
            delta_v[...] = 0.0

    if s.u_star == 0 and delta_u.any():
        delta_u = _fold(delta_u, "u", fold_negative)
    if s.v_star == 0 and delta_v.any():
        delta_v = _fold(delta_v, "v", fold_negative)

    total = (
        norms(Field(grid, delta_u)).w22_equiv
        + norms(Field(grid, delta_v)).w22_equiv
    )
    if total == 0:
        raise PerturbationError("The requested modes produce no perturbation")
    target = epsilon * BUDGET_FRACTION
    scale = target / total

    u = s.u_star + scale * delta_u
    v = s.v_star + scale * delta_v
    if (u < 0).any() or (v < 0).any():
        logger.warning("Clipping negative initial values")
        u = np.maximum(u, 0.0)
        v = np.maximum(v, 0.0)

    state = SimState.from_arrays(grid, u, v, 0.0)
    achieved = (
        norms(state.u - s.u_star).w22_equiv
        + norms(state.v - s.v_star).w22_equiv
    )
    if abs(achieved - target) > BUDGET_RTOL * target:
        raise PerturbationError(
            f"Budget {target:.6g} unattainable after clipping, "
            f"achieved {achieved:.6g}"
        )
    logger.info(
        f"Perturbation built: {len(modes)} mode(s), W22 budget {target:.6g}"
    )
    return state


__all__ = ["ModeSpec", "perturb_steady_state"]
