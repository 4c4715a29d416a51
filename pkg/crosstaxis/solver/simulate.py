import logging
import math
from collections.abc import Iterable

import numpy as np

from crosstaxis.errors import BlowUpError, SolverError, ValidationError
from crosstaxis.functionals import WeightSet, couplings, record
from crosstaxis.model import Parameters, SteadyState, steady_state
from crosstaxis.solver.base import Forcing, Stepper
from crosstaxis.solver.state import SimState, StepControl, TimeSeries

logger = logging.getLogger("crosstaxis")

# Relative slack when matching a time span against an integer step count
_STEP_RTOL = 1e-9


def _step_count(span: float, dt: float, what: str) -> int:
    count = round(span / dt)
    if count < 0 or abs(count * dt - span) > _STEP_RTOL * max(span, dt):
        raise ValidationError(
            f"{what} = {span:.17g} is not a multiple of dt = {dt:.17g}"
        )
    return int(count)


def _check_bounds(
    u: np.ndarray, v: np.ndarray, t: float, bound: float
) -> None:
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise BlowUpError(t, math.inf, bound)
    peak = max(float(np.max(u)), float(np.max(v)))
    if peak > bound:
        raise BlowUpError(t, peak, bound)



def _zero_mass_species(p: Parameters) -> tuple[str, ...]:
    """Species that carry zero mass under H1 and must stay zero."""
    if not p.is_h1:
        return ()
    return tuple(
        name for name, mass in (("u", p.m1), ("v", p.m2)) if mass == 0
    )


def _check_zero_species(
    names: tuple[str, ...], u: np.ndarray, v: np.ndarray, t: float
) -> None:
    for name in names:
        values = u if name == "u" else v
        if np.any(values != 0):
            raise SolverError(
                f"Zero-mass species {name} became nonzero at t={t:.6g}: "
                f"max |{name}| = {float(np.max(np.abs(values))):.3e}"
            )


def simulate(
    initial: SimState,
    p: Parameters,
    ctl: StepControl,
    t_end: float,
    sampling: float,
    eta: float,
    weights: WeightSet,
    steady: SteadyState | None = None,
    snapshot_times: Iterable[float] = (),
    overflow_bound: float = 1e6,
    forcing: Forcing | None = None,
    time_origin: float | None = None,
) -> TimeSeries:
    """Integrate from ``initial`` to ``t_end`` and record functionals.

    Time advances in whole steps t_k = origin + k * dt, where the origin
    defaults to ``initial.t``; samples are taken every ``sampling`` time
    units counted from the origin and at the final step. Leaving the
    eta-tube is recorded as ``exit_time`` and the run continues.

    Raises:
        ValidationError: On an empty span or a cadence that is not a
            multiple of dt.
        BlowUpError: If a field becomes non-finite or exceeds
            ``overflow_bound``.
        SolverError: Propagated from the stepper, or when a zero-mass
            species becomes nonzero under H1.
    """
    # Imported here: the registry module imports this one.
    from crosstaxis.solver import select_stepper

    if not t_end > initial.t:
        raise ValidationError(
            f"t_end = {t_end} must exceed the initial time {initial.t}"
        )
    if not eta > 0:
        raise ValidationError(f"eta must be > 0, got {eta}")
    if not overflow_bound > 0:
        raise ValidationError("overflow_bound must be > 0")

    grid = initial.grid
    dt = ctl.dt
    origin = initial.t if time_origin is None else float(time_origin)
    first = _step_count(initial.t - origin, dt, "initial time offset")
    last = _step_count(t_end - origin, dt, "t_end")
    every = _step_count(sampling, dt, "sampling")
    if every < 1:
        raise ValidationError("sampling must be at least one step")
    snapshot_steps = {
        round((ts - origin) / dt)
        for ts in snapshot_times
        if initial.t <= ts <= t_end
    }

    if steady is None:
        steady = steady_state(p, grid.volume)
    stepper: Stepper = select_stepper(ctl.scheme)(p, ctl, grid)

    records = []
    cpl_records = []
    snapshots = []
    exit_time = None

    def sample(state: SimState) -> None:
        nonlocal exit_time
        rec = record(state, steady, weights)
        cpl = couplings(state, steady)
        records.append(rec)
        cpl_records.append(cpl)
        logger.debug(
            f"t={state.t:.6g} y={rec.y:.6e} "
            f"w22={rec.w22_u + rec.w22_v:.6e}"
        )
        if exit_time is None and cpl.linf_u + cpl.linf_v >= eta:
            exit_time = state.t
            logger.warning(
                f"Left the eta-tube (eta={eta:.3g}) at t={state.t:.6g}"
            )

    u = initial.u.values
    v = initial.v.values
    zero_species = _zero_mass_species(p)
    _check_zero_species(zero_species, u, v, origin + first * dt)
    for k in range(first, last + 1):
        t = origin + k * dt
        if k == first or k == last or k % every == 0 or k in snapshot_steps:
            state = SimState.from_arrays(grid, u, v, t)
            if k == first or k == last or k % every == 0:
                sample(state)
            if k in snapshot_steps:
                snapshots.append(state)
        if k == last:
            break
        u, v = stepper.step_arrays(u, v, t, forcing)
        _check_bounds(u, v, origin + (k + 1) * dt, overflow_bound)
        _check_zero_species(zero_species, u, v, origin + (k + 1) * dt)

    final = SimState.from_arrays(grid, u, v, origin + last * dt)
    if stepper.clipped_mass:
        logger.warning(f"Total clipped mass {stepper.clipped_mass:.3e}")
    logger.info(
        f"Simulated {last - first} steps to t={final.t:.6g}, "
        f"{len(records)} samples"
    )
    return TimeSeries(
        records=tuple(records),
        couplings=tuple(cpl_records),
        snapshots=tuple(snapshots),
        exit_time=exit_time,
        clipped_mass=stepper.clipped_mass,
        final_state=final,
    )


__all__ = ["simulate"]
