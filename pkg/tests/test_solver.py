import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from crosstaxis.errors import (
    BlowUpError,
    PerturbationError,
    SolverError,
    StepRejected,
    ValidationError,
)
from crosstaxis.functionals import weights_for_regime
from crosstaxis.grid import Field, Grid, norms
from crosstaxis.inequalities import cosine_mode
from crosstaxis.model import Parameters, classify_regime, steady_state
from crosstaxis.solver import (
    DiffusionSolver,
    ImexEulerStepper,
    ModeSpec,
    Scheme,
    SimState,
    StepControl,
    StrangImexStepper,
    perturb_steady_state,
    select_stepper,
    simulate,
    step,
    stepper_for,
)

SCHEMES = [Scheme.IMEX_EULER, Scheme.STRANG_IMEX]
MODES = [ModeSpec((1,)), ModeSpec((2,))]


def _steady(p, grid):
    s = steady_state(p, grid.volume)
    return SimState(
        Field.constant(grid, s.u_star), Field.constant(grid, s.v_star)
    )


def _setup(p, grid, epsilon=0.01, modes=MODES, seed=0):
    s = steady_state(p, grid.volume)
    regime = classify_regime(p)
    w = weights_for_regime(p, s, regime, 1.0 / math.pi**2)
    initial = perturb_steady_state(
        s, grid, epsilon, modes, seed=seed, regime=regime
    )
    return initial, s, w


def test_select_stepper():
    assert select_stepper("imex_euler") is ImexEulerStepper
    assert select_stepper(Scheme.STRANG_IMEX) is StrangImexStepper
    with pytest.raises(ValueError):
        select_stepper("rk4")


@pytest.mark.parametrize("scheme", SCHEMES)
def test_steady_state_is_a_fixed_point(coexistence, scheme):
    grid = Grid((8, 8), (1.0, 1.0))
    state = _steady(coexistence, grid)
    ctl = StepControl(dt=0.01, scheme=scheme)
    for _ in range(5):
        state = step(state, coexistence, ctl)
    assert_allclose(state.u.values, 4 / 3, atol=1e-13)
    assert_allclose(state.v.values, 1 / 3, atol=1e-13)
    assert state.t == pytest.approx(0.05)


def test_implicit_diffusion_damps_each_mode_exactly():
    grid = Grid((32,), (1.0,))
    p = Parameters(D1=0.5, D2=1.0, chi1=1.0, chi2=1.0, m1=1.0, m2=1.0)
    dt, k = 0.01, 2
    h = grid.spacing[0]
    eigenvalue = (2.0 / h) ** 2 * math.sin(math.pi * k * h / 2.0) ** 2
    mode = cosine_mode(grid, (k,))
    u = 1.0 + 0.01 * mode
    state = SimState.from_arrays(grid, u, np.ones(grid.shape))
    stepped = step(state, p, StepControl(dt=dt, cg_rtol=1e-13))
    expected = 1.0 + 0.01 * mode / (1.0 + dt * p.D1 * eigenvalue)
    assert_allclose(stepped.u.values, expected, atol=1e-12)


def test_diffusion_solver_preserves_mean():
    grid = Grid((12, 10), (1.0, 2.0))
    rng = np.random.default_rng(1)
    rhs = 2.0 + rng.standard_normal(grid.shape)
    solution = DiffusionSolver(grid, 0.05).solve(rhs)
    assert np.mean(solution) == pytest.approx(np.mean(rhs), rel=1e-14)
    assert np.std(solution) < np.std(rhs)


@pytest.mark.parametrize("name", ["coexistence", "degenerate", "h1"])
def test_perturbation_hits_the_budget(name, request, line):
    p = request.getfixturevalue(name)
    initial, s, _ = _setup(p, line)
    achieved = (
        norms(initial.u - s.u_star).w22_equiv
        + norms(initial.v - s.v_star).w22_equiv
    )
    assert achieved == pytest.approx(0.01 * (1 - 1e-6), rel=1e-10)
    assert np.all(initial.u.values >= 0)
    assert np.all(initial.v.values >= 0)


def test_perturbation_is_seeded(coexistence, line):
    first, _, _ = _setup(coexistence, line, seed=4)
    again, _, _ = _setup(coexistence, line, seed=4)
    other, _, _ = _setup(coexistence, line, seed=5)
    assert np.array_equal(first.u.values, again.u.values)
    assert not np.array_equal(first.u.values, other.u.values)


def test_perturbation_without_folding_rejected(degenerate, line):
    s = steady_state(degenerate, 1.0)
    with pytest.raises(PerturbationError):
        perturb_steady_state(
            s,
            line,
            0.01,
            [ModeSpec((1,), component="v")],
            regime=classify_regime(degenerate),
            fold_negative=False,
        )


@pytest.mark.parametrize(
    "modes",
    [
        [ModeSpec((0,))],
        [ModeSpec((32,))],
        [ModeSpec((1, 1))],
        [],
    ],
)
def test_invalid_modes(h1, line, modes):
    with pytest.raises(PerturbationError):
        _setup(h1, line, modes=modes)


def test_mode_spec_rejects_negative_index():
    with pytest.raises(PerturbationError):
        ModeSpec((-1,))


def test_stability_guard_rejects_large_steps():
    grid = Grid((32,), (1.0,))
    p = Parameters(D1=1.0, D2=1.0, chi1=100.0, chi2=100.0, m1=1.0, m2=1.0)
    mode = cosine_mode(grid, (4,))
    state = SimState.from_arrays(grid, 1.0 + mode, 1.0 - 0.5 * mode)
    with pytest.raises(StepRejected) as info:
        step(state, p, StepControl(dt=0.1))
    assert info.value.suggested_dt < 0.1
    assert info.value.cfl > info.value.guard


@pytest.mark.parametrize("scheme", SCHEMES)
def test_h1_conserves_mass(h1, scheme):
    grid = Grid((16, 16), (1.0, 1.0))
    modes = [ModeSpec((1, 0)), ModeSpec((1, 2))]
    initial, s, w = _setup(h1, grid, modes=modes)
    series = simulate(
        initial, h1, StepControl(dt=0.01, scheme=scheme), 0.5, 0.1, 0.1, w
    )
    for name in ("mass_u", "mass_v"):
        mass = series.column(name)
        assert np.ptp(mass) <= 1e-12 * mass[0]
    y = series.column("y")
    assert np.all(np.diff(y) <= 1e-10 * y[0])
    assert series.exit_time is None
    assert series.clipped_mass == 0.0


def _prey_only_h1(grid, u):
    p = Parameters(D1=1.0, D2=1.0, chi1=1.0, chi2=1.0, m1=0.0, m2=1.0)
    regime = classify_regime(p)
    s = steady_state(p, grid.volume)
    w = weights_for_regime(p, s, regime)
    v = 1.0 + 0.1 * cosine_mode(grid, (1,))
    return p, SimState.from_arrays(grid, u, v), w


def test_h1_zero_mass_species_stays_zero(line):
    p, initial, w = _prey_only_h1(line, np.zeros(line.shape))
    series = simulate(initial, p, StepControl(dt=0.01), 0.5, 0.1, 0.1, w)
    assert np.all(series.column("l1_u") == 0)
    assert np.all(series.final_state.u.values == 0)


def test_h1_zero_mass_species_must_start_at_zero(line):
    u = 1e-3 * (1.0 + cosine_mode(line, (2,)))
    p, initial, w = _prey_only_h1(line, u)
    with pytest.raises(SolverError, match="Zero-mass species u"):
        simulate(initial, p, StepControl(dt=0.01), 0.5, 0.1, 0.1, w)


def test_step_reuses_one_stepper_per_setup(coexistence, line):
    initial, s, w = _setup(coexistence, line)
    ctl = StepControl(dt=0.01)
    stepper = stepper_for(coexistence, ctl, line)
    assert stepper_for(coexistence, ctl, line) is stepper
    other = stepper_for(coexistence, StepControl(dt=0.02), line)
    assert other is not stepper
    once = step(initial, coexistence, ctl)
    twice = step(initial, coexistence, ctl)
    assert np.array_equal(once.u.values, twice.u.values)
    assert np.array_equal(once.v.values, twice.v.values)
    fresh = ImexEulerStepper(coexistence, ctl, line).step(initial)
    assert_allclose(once.u.values, fresh.u.values, rtol=1e-13)


def test_simulate_samples_and_snapshots(coexistence, line):
    initial, s, w = _setup(coexistence, line)
    series = simulate(
        initial,
        coexistence,
        StepControl(dt=0.01),
        1.0,
        0.25,
        0.1,
        w,
        snapshot_times=[0.0, 0.5],
    )
    assert_allclose(series.times, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert [snap.t for snap in series.snapshots] == [0.0, 0.5]
    assert series.final_state.t == pytest.approx(1.0)
    assert series.distances()[-1] < series.distances()[0]


def test_simulate_records_exit_time(coexistence, line):
    initial, s, w = _setup(coexistence, line)
    ctl = StepControl(dt=0.01)
    series = simulate(initial, coexistence, ctl, 0.1, 0.05, 1e-6, w)
    assert series.exit_time == 0.0
    assert len(series) == 3


@pytest.mark.parametrize(
    "t_end, sampling",
    [(0.0, 0.05), (1.0, 0.015), (1.005, 0.05)],
)
def test_simulate_rejects_misaligned_times(
    coexistence, line, t_end, sampling
):
    initial, s, w = _setup(coexistence, line)
    with pytest.raises(ValidationError):
        simulate(
            initial,
            coexistence,
            StepControl(dt=0.01),
            t_end,
            sampling,
            0.1,
            w,
        )


def test_blow_up_sentinel(coexistence, line):
    initial, s, w = _setup(coexistence, line)
    with pytest.raises(BlowUpError):
        simulate(
            initial,
            coexistence,
            StepControl(dt=0.01),
            0.1,
            0.05,
            0.1,
            w,
            overflow_bound=1.0,
        )


@pytest.mark.parametrize(
    "settings",
    [
        {"dt": 0.0},
        {"dt": 0.01, "scheme": "rk4"},
        {"dt": 0.01, "stability_guard": 1.5},
        {"dt": 0.01, "cg_rtol": 1.0},
    ],
)
def test_step_control_validation(settings):
    with pytest.raises(ValidationError):
        StepControl(**settings)


def test_strang_taxis_substeps_follow_the_grid(coexistence):
    state = _steady(coexistence, Grid((32,), (1.0,)))
    u, v = state.u.values, state.v.values
    coarse = StrangImexStepper(coexistence, StepControl(dt=0.01), state.grid)
    fine = StrangImexStepper(coexistence, StepControl(dt=1e-4), state.grid)
    assert coarse.taxis_substeps(u, v) > 1
    assert fine.taxis_substeps(u, v) == 1


def test_strang_is_stable_on_a_stiff_grid(coexistence):
    grid = Grid((32,), (1.0,))
    initial, s, w = _setup(coexistence, grid, epsilon=0.05)
    ctl = StepControl(dt=0.01, scheme=Scheme.STRANG_IMEX)
    series = simulate(initial, coexistence, ctl, 1.0, 0.1, 0.5, w)
    distances = series.distances()
    assert np.all(np.isfinite(distances))
    assert distances[-1] < 0.5 * distances[0]
