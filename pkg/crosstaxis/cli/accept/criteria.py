"""The acceptance criteria, one function per criterion.

Every criterion returns ``(passed, detail)``; ``run_acceptance`` times
them and collects the ledger.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from crosstaxis.analysis import (
    RateModel,
    fit_exponential,
    noise_floor,
    reciprocal_r_squared,
    tail_window,
)
from crosstaxis.cli.simulate import ExperimentResult, run_simulate
from crosstaxis.config import config_from_dict
from crosstaxis.functionals import cancellation_residuals, weights_for_regime
from crosstaxis.grid import Field, Grid
from crosstaxis.inequalities import (
    INEQUALITY_IDS,
    TestFieldSpec,
    cosine_mode,
    estimate_constants,
    gn_ratios,
    poincare_ratios,
    random_test_field,
    w22_equivalence_ratio,
)
from crosstaxis.model import (
    Parameters,
    RegimeTag,
    classify_regime,
    jacobian_at_steady_state,
    reaction,
    steady_state,
)
from crosstaxis.solver import (
    Forcing,
    Scheme,
    StepControl,
    perturb_steady_state,
    select_stepper,
)
from crosstaxis.solver.perturbation import ModeSpec

logger = logging.getLogger("crosstaxis")

ORACLE_TOL = 1e-10
# Slack on nonnegativity, residual and Jacobian signs of oracle roots
ROOT_SLACK = 1e-9
ORACLE_RANDOM_STARTS = 4
AXIS_SNAP = 1e-6
CANCELLATION_RTOL = 1e-12
FIT_RESIDUAL_MAX = 0.05
RESIDUAL_FACTOR_MIN = 5.0
RECIPROCAL_R2_MIN = 0.99
MASS_RATIO_RANGE = (3.5, 4.5)
POINCARE_SLACK = 0.05
SATURATION_RTOL = 0.02
SCALE_RTOL = 1e-9

COEXISTENCE = {
    "lambda1": 1.0,
    "lambda2": 1.0,
    "mu1": 1.0,
    "mu2": 1.0,
    "a1": 1.0,
    "a2": 0.5,
}
DEGENERATE = {**COEXISTENCE, "lambda2": 0.5}
STRICT_EXCLUSION = {**COEXISTENCE, "lambda2": 0.2}


@dataclass(frozen=True)
class AcceptanceSettings:
    """Where and how large the acceptance runs are.

    ``quick`` shrinks horizons and draw counts for smoke runs; a quick
    pass is not an acceptance pass.
    """

    directory: Path
    seed: int = 0
    quick: bool = False

    def pick(self, full, quick):
        return quick if self.quick else full


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


# ---------------------------------------------------------------------------
# Steady states and weights
# ---------------------------------------------------------------------------


def _draw_parameters(rng: np.random.Generator, tag: RegimeTag) -> Parameters:
    """Random kinetic parameters of regime ``tag``."""
    lambda1, mu1, mu2, a1, a2 = rng.uniform(0.2, 2.0, size=5)
    threshold = lambda1 * a2 / mu1
    if tag is RegimeTag.COEXISTENCE:
        lambda2 = threshold * rng.uniform(1.1, 3.0)
    elif tag is RegimeTag.STRICT_EXCLUSION:
        lambda2 = threshold * rng.uniform(0.0, 0.9)
    else:
        lambda2 = threshold
    D1, D2, chi1, chi2 = rng.uniform(0.2, 2.0, size=4)
    return Parameters(
        D1=D1,
        D2=D2,
        chi1=chi1,
        chi2=chi2,
        lambda1=lambda1,
        lambda2=lambda2,
        mu1=mu1,
        mu2=mu2,
        a1=a1,
        a2=a2,
    )


def damped_newton(
    p: Parameters,
    start: tuple[float, float],
    tol: float = 1e-15,
    max_iter: int = 100,
) -> tuple[float, float]:
    """Root of the kinetics (f, g) = 0 near ``start`` by damped Newton.

    Independent of the closed forms: only the kinetics and their
    derivatives enter. The step is halved until the residual norm drops.
    """

    def residual(x: np.ndarray) -> np.ndarray:
        return np.array(reaction(p, x[0], x[1]), dtype=float)

    x = np.array(start, dtype=float)
    F = residual(x)
    for _ in range(max_iter):
        norm = float(np.linalg.norm(F))
        if norm <= tol:
            break
        u, v = x
        jacobian = np.array(
            [
                [p.lambda1 - 2 * p.mu1 * u + p.a1 * v, p.a1 * u],
                [-p.a2 * v, p.lambda2 - 2 * p.mu2 * v - p.a2 * u],
            ]
        )
        try:
            step = np.linalg.solve(jacobian, -F)
        except np.linalg.LinAlgError:
            break
        if np.linalg.norm(step) <= 1e-16 * (1.0 + np.linalg.norm(x)):
            break
        damping = 1.0
        trial = x + step
        F_trial = residual(trial)
        while (
            np.linalg.norm(F_trial) >= (1.0 - 0.5 * damping) * norm
            and damping > 1e-6
        ):
            damping *= 0.5
            trial = x + damping * step
            F_trial = residual(trial)
        x, F = trial, F_trial
    return float(x[0]), float(x[1])


def _prey_axis_root(p: Parameters, u: float, max_iter: int = 50) -> float:
    """Polish ``u`` by scalar Newton on the invariant prey axis v = 0."""
    for _ in range(max_iter):
        slope = p.lambda1 - 2 * p.mu1 * u
        if slope == 0:
            break
        correction = reaction(p, u, 0.0)[0] / slope
        u -= correction
        if abs(correction) <= 1e-16 * (1.0 + abs(u)):
            break
    return u


def oracle_steady_state(
    p: Parameters,
    rng: np.random.Generator,
    random_starts: int = ORACLE_RANDOM_STARTS,
) -> tuple[float, float] | None:
    """Steady state located by damped Newton from several quadrant starts.

    Only the kinetics enter. Every converged root in the nonnegative
    quadrant whose diagonal Jacobian entries are weakly negative is kept.
    Roots next to the prey axis are polished on it, where a degenerate
    double root becomes simple. The oracle answers when the kept roots
    agree and returns None otherwise.
    """
    u_cap = p.lambda1 / p.mu1
    v_cap = p.lambda2 / p.mu2
    scale = max(u_cap, v_cap, 1.0)
    starts = [(u_cap, v_cap), (1.0, 1.0), (u_cap, 0.0)]
    starts += [
        (float(a), float(b))
        for a, b in rng.uniform(0.0, 2.0 * scale, size=(random_starts, 2))
    ]

    candidates = []
    for start in starts:
        u, v = damped_newton(p, start, tol=0.0, max_iter=200)
        if not (math.isfinite(u) and math.isfinite(v)):
            continue
        if abs(v) <= AXIS_SNAP * scale:
            u, v = _prey_axis_root(p, u), 0.0
        if min(u, v) < -ROOT_SLACK * scale:
            continue
        residual = float(np.linalg.norm(reaction(p, u, v)))
        if residual > ROOT_SLACK * scale**2:
            continue
        fu = p.lambda1 - 2 * p.mu1 * u + p.a1 * v
        gv = p.lambda2 - 2 * p.mu2 * v - p.a2 * u
        if max(fu, gv) > ROOT_SLACK * scale:
            continue
        candidates.append((residual, u, v))

    if not candidates:
        logger.warning(f"Oracle found no admissible root for {p}")
        return None
    candidates.sort()
    _, u, v = candidates[0]
    for _, other_u, other_v in candidates[1:]:
        if abs(other_u - u) > 1e-6 * scale or abs(other_v - v) > 1e-6 * scale:
            logger.warning(
                f"Oracle roots disagree: ({u:.6g}, {v:.6g}) and "
                f"({other_u:.6g}, {other_v:.6g})"
            )
            return None
    return u, v


_DRAW_TAGS = (
    RegimeTag.COEXISTENCE,
    RegimeTag.STRICT_EXCLUSION,
    RegimeTag.DEGENERATE_EXCLUSION,
)


def steady_state_oracle(settings: AcceptanceSettings) -> tuple[bool, str]:
    draws = settings.pick(1000, 100)
    rng = np.random.default_rng([settings.seed, 1])
    worst = 0.0
    sign_failures = 0
    regime_failures = 0
    oracle_failures = 0
    for index in range(draws):
        tag = _DRAW_TAGS[index % len(_DRAW_TAGS)]
        p = _draw_parameters(rng, tag)
        if classify_regime(p).tag is not tag:
            regime_failures += 1
            continue
        s = steady_state(p, 1.0)
        root = oracle_steady_state(p, rng)
        if root is None:
            oracle_failures += 1
            continue
        u, v = root
        worst = max(
            worst,
            abs(u - s.u_star) / (1.0 + s.u_star),
            abs(v - s.v_star) / (1.0 + s.v_star),
        )
        jac = jacobian_at_steady_state(p, s)
        strict = tag is not RegimeTag.DEGENERATE_EXCLUSION
        if not jac.weak_signs or (strict and not jac.strict_signs):
            sign_failures += 1
    passed = (
        worst <= ORACLE_TOL
        and sign_failures == 0
        and regime_failures == 0
        and oracle_failures == 0
    )
    detail = (
        f"{draws} draws, worst deviation {worst:.2e}, "
        f"sign failures {sign_failures}, regime failures {regime_failures}, "
        f"oracle failures {oracle_failures}"
    )
    return passed, detail


def _cancellation_scales(w, p: Parameters, s) -> tuple[float, ...]:
    u, v = s.u_star, s.v_star
    pairs = (
        (w.A1 * p.a1 * u, w.A2 * p.a2 * v),
        ((w.A1 * p.chi1 + w.B1 * p.a1) * u, (w.A2 * p.chi2 + w.B2 * p.a2) * v),
        ((w.B1 * p.chi1 + w.C1 * p.a1) * u, (w.B2 * p.chi2 + w.C2 * p.a2) * v),
        (w.C1 * p.chi1 * u, w.C2 * p.chi2 * v),
    )
    return tuple(max(abs(a), abs(b)) for a, b in pairs)


def cancellation_identities(
    settings: AcceptanceSettings,
) -> tuple[bool, str]:
    draws = settings.pick(1000, 100)
    rng = np.random.default_rng([settings.seed, 2])
    worst = 0.0
    for _ in range(draws):
        p = _draw_parameters(rng, RegimeTag.COEXISTENCE)
        s = steady_state(p, 1.0)
        w = weights_for_regime(p, s, classify_regime(p))
        residuals = cancellation_residuals(w, p, s)
        for residual, scale in zip(
            residuals, _cancellation_scales(w, p, s)
        ):
            worst = max(worst, abs(residual) / scale)
    return (
        worst <= CANCELLATION_RTOL,
        f"{draws} coexistence draws, worst relative residual {worst:.2e}",
    )


# ---------------------------------------------------------------------------
# Long runs
# ---------------------------------------------------------------------------


def _run(
    settings: AcceptanceSettings,
    name: str,
    parameters: dict[str, float],
    t_end: float,
    points: int,
    sample_every: float,
    dt: float = 0.01,
    scheme: str = "imex_euler",
) -> ExperimentResult:
    config = config_from_dict(
        {
            "name": name,
            "parameters": {"D1": 1.0, "D2": 1.0, "chi1": 1.0, "chi2": 1.0}
            | parameters,
            "grid": {"points": [points], "lengths": [1.0]},
            "perturbation": {
                "epsilon": 1e-2,
                "modes": [{"indices": [1]}, {"indices": [2]}],
                "seed": settings.seed,
            },
            "stepping": {
                "scheme": scheme,
                "dt": dt,
                "t_end": t_end,
                "sample_every": sample_every,
            },
            "outputs": {
                "directory": str(settings.directory / name),
                "plot_scripts": False,
            },
        }
    )
    return run_simulate(config)


def _check_flags(result: ExperimentResult, names: tuple[str, ...]) -> str:
    failed = [n for n in names if not result.checks.get(n, False)]
    return ", ".join(failed)


def h1_conservation_decay(settings: AcceptanceSettings) -> tuple[bool, str]:
    result = _run(
        settings,
        "h1",
        {"m1": 1.0, "m2": 1.0},
        t_end=settings.pick(50.0, 5.0),
        points=settings.pick(256, 64),
        sample_every=0.02,
    )
    failed = _check_flags(
        result,
        ("mass_u_conserved", "mass_v_conserved", "y_nonincreasing"),
    )
    selection = result.selection
    if selection is None:
        return False, "no decay fit"
    fit = selection.exponential
    passed = (
        not failed
        and selection.winner is RateModel.EXPONENTIAL
        and fit.K2 > 0
        and fit.residual <= FIT_RESIDUAL_MAX
    )
    return passed, (
        f"winner {selection.winner.value}, K2={fit.K2:.4g}, "
        f"residual {fit.residual:.2e}, failed checks [{failed}]"
    )


def coexistence_exponential(
    settings: AcceptanceSettings,
) -> tuple[bool, str]:
    result = _run(
        settings,
        "coexistence",
        COEXISTENCE,
        t_end=settings.pick(50.0, 5.0),
        points=settings.pick(128, 64),
        sample_every=0.02,
    )
    steady = (result.steady.u_star, result.steady.v_star)
    selection = result.selection
    if selection is None:
        return False, "no decay fit"
    failed = _check_flags(result, ("exit_time_absent", "y_nonincreasing"))
    passed = (
        not failed
        and np.allclose(steady, (4.0 / 3.0, 1.0 / 3.0), rtol=1e-12)
        and selection.winner is RateModel.EXPONENTIAL
        and selection.residual_ratio >= RESIDUAL_FACTOR_MIN
    )
    return passed, (
        f"steady ({steady[0]:.6g}, {steady[1]:.6g}), winner "
        f"{selection.winner.value}, residual ratio "
        f"{selection.residual_ratio:.3g}, failed checks [{failed}]"
    )


def degenerate_algebraic(settings: AcceptanceSettings) -> tuple[bool, str]:
    result = _run(
        settings,
        "degenerate",
        DEGENERATE,
        t_end=settings.pick(400.0, 40.0),
        points=64,
        sample_every=0.5,
    )
    selection = result.selection
    if selection is None:
        return False, "no decay fit"
    t, l1_v = tail_window(
        result.series.times,
        result.series.column("l1_v"),
        result.config["monitoring"]["tail_fraction"],
    )
    r_squared = reciprocal_r_squared(t, l1_v)

    # mass ODE residual of the second-order scheme, sampling tied to dt
    norms = []
    for dt in (0.01, 0.005):
        mass = _run(
            settings,
            f"degenerate_mass_dt{dt:g}",
            DEGENERATE,
            t_end=settings.pick(10.0, 2.0),
            points=64,
            sample_every=4 * dt,
            dt=dt,
            scheme=Scheme.STRANG_IMEX.value,
        )
        if mass.mass_residual is None:
            return False, "no mass residual recorded"
        norms.append(mass.mass_residual.norm())
    shrink = norms[0] / norms[1] if norms[1] > 0 else math.inf

    low, high = MASS_RATIO_RANGE
    passed = (
        selection.winner is RateModel.ALGEBRAIC
        and selection.residual_ratio >= RESIDUAL_FACTOR_MIN
        and r_squared >= RECIPROCAL_R2_MIN
        and low <= shrink <= high
    )
    return passed, (
        f"winner {selection.winner.value}, residual ratio "
        f"{selection.residual_ratio:.3g}, 1/|v|_1 R^2 {r_squared:.5f}, "
        f"mass residual shrink {shrink:.3g}"
    )


def strict_exclusion_exponential(
    settings: AcceptanceSettings,
) -> tuple[bool, str]:
    result = _run(
        settings,
        "strict_exclusion",
        STRICT_EXCLUSION,
        t_end=settings.pick(50.0, 10.0),
        points=settings.pick(128, 64),
        sample_every=0.1,
    )
    selection = result.selection
    if selection is None:
        return False, "no decay fit"
    grid = Grid((settings.pick(128, 64),), (1.0,))
    t, v_l2 = tail_window(
        result.series.times,
        np.sqrt(result.series.column("e_v0")),
        result.config["monitoring"]["tail_fraction"],
        floor=noise_floor(result.steady, grid),
    )
    v_fit = fit_exponential(t, v_l2)
    w22_fit = selection.exponential
    passed = (
        v_fit.residual <= FIT_RESIDUAL_MAX
        and w22_fit.residual <= FIT_RESIDUAL_MAX
        and v_fit.K2 > 0
        and w22_fit.K2 > 0
    )
    return passed, (
        f"|v|_2 residual {v_fit.residual:.2e} (K2={v_fit.K2:.4g}), "
        f"W22 residual {w22_fit.residual:.2e} (K2={w22_fit.K2:.4g})"
    )


# ---------------------------------------------------------------------------
# Inequalities
# ---------------------------------------------------------------------------


def _saturation_limits() -> dict[str, float]:
    """Ratios of cos(pi x) on the unit interval in the continuum."""
    pi2 = math.pi**2
    return {
        "poincare_l2": 1.0 / pi2,
        "poincare_gradient": 1.0 / pi2,
        "poincare_laplacian": 1.0 / pi2,
        "w22_equivalence": math.sqrt(1.0 + 1.0 / pi2 + 1.0 / pi2**2),
        "gn_quartic": 0.75,
        "gn_sextic": 0.625,
        "gn_cubic": 8.0 / (3.0 * math.pi),
    }


def _ratio_vector(f: Field) -> np.ndarray:
    return np.array(
        [*poincare_ratios(f), w22_equivalence_ratio(f), *gn_ratios(f)]
    )


def inequality_campaign(settings: AcceptanceSettings) -> tuple[bool, str]:
    grid = Grid((128,), (1.0,))
    spec = TestFieldSpec(
        seed=settings.seed, max_mode=8, count=settings.pick(100, 20)
    )
    reports = estimate_constants(spec, grid)
    problems = []

    poincare = reports["poincare_l2"]
    bound = (1.0 + POINCARE_SLACK) / math.pi**2
    if poincare.max_ratio > bound or poincare.argmax_label != "mode_1":
        problems.append(
            f"poincare max {poincare.max_ratio:.5g} at "
            f"{poincare.argmax_label}"
        )

    for name in INEQUALITY_IDS:
        trend = reports[name].refinement_trend
        if not 0.5 <= trend <= 2.0:
            problems.append(f"{name} refinement trend {trend:.3g}")

    for index in range(5):
        f = random_test_field(spec, grid, index)
        base = _ratio_vector(f)
        for factor in (1e-3, 7.5):
            scaled = _ratio_vector(f * factor)
            if not np.allclose(scaled, base, rtol=SCALE_RTOL, atol=0.0):
                problems.append(f"sample {index} not scale invariant")

    lowest = Field(grid, cosine_mode(grid, (1,)))
    observed = dict(
        zip(
            ("poincare_l2", "poincare_gradient", "poincare_laplacian"),
            poincare_ratios(lowest),
        )
    )
    observed["w22_equivalence"] = w22_equivalence_ratio(lowest)
    observed.update(
        zip(("gn_quartic", "gn_sextic", "gn_cubic"), gn_ratios(lowest))
    )
    for name, limit in _saturation_limits().items():
        if abs(observed[name] - limit) > SATURATION_RTOL * limit:
            problems.append(
                f"{name} saturation {observed[name]:.5g} vs {limit:.5g}"
            )

    detail = f"poincare max {poincare.max_ratio:.6g}"
    if problems:
        detail += "; " + "; ".join(problems)
    return not problems, detail


# ---------------------------------------------------------------------------
# Orders of accuracy
# ---------------------------------------------------------------------------


def _integrate(
    p: Parameters,
    grid: Grid,
    u: np.ndarray,
    v: np.ndarray,
    scheme: Scheme,
    dt: float,
    steps: int,
    forcing: Forcing | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    ctl = StepControl(dt=dt, scheme=scheme, cg_rtol=1e-12)
    stepper = select_stepper(scheme)(p, ctl, grid)
    for k in range(steps):
        u, v = stepper.step_arrays(u, v, k * dt, forcing)
    return u, v


def _l2_error(grid: Grid, u, v, u_ref, v_ref) -> float:
    squared = np.sum((u - u_ref) ** 2 + (v - v_ref) ** 2)
    return math.sqrt(float(squared) * grid.cell_volume)


def _observed_order(sizes, errors) -> float:
    slope, _ = np.polyfit(np.log(sizes), np.log(errors), 1)
    return float(slope)


def temporal_order(
    scheme: Scheme, dt0: float = 0.01, t_end: float = 1.0
) -> float:
    """Observed order against a run with dt0 / 64."""
    p = Parameters(D1=1.0, D2=1.0, chi1=1.0, chi2=1.0, **COEXISTENCE)
    grid = Grid((32,), (1.0,))
    s = steady_state(p, grid.volume)
    initial = perturb_steady_state(
        s, grid, 0.05, [ModeSpec((1,)), ModeSpec((2,))], seed=0
    )
    u0, v0 = initial.u.values, initial.v.values

    def run(dt: float) -> tuple[np.ndarray, np.ndarray]:
        return _integrate(p, grid, u0, v0, scheme, dt, round(t_end / dt))

    u_ref, v_ref = run(dt0 / 64)
    dts = [dt0, dt0 / 2, dt0 / 4]
    errors = [_l2_error(grid, *run(dt), u_ref, v_ref) for dt in dts]
    return _observed_order(dts, errors)


def manufactured_forcing(
    grid: Grid, p: Parameters, alpha: float, beta: float
) -> tuple[np.ndarray, np.ndarray, Forcing]:
    """Stationary solution 1 + alpha cos(pi x), 1 + beta cos(2 pi x).

    Returns the exact fields at cell centers and the source terms that
    make them stationary (1D, unit length).
    """
    x = grid.centers(0)
    pi = math.pi
    u = 1.0 + alpha * np.cos(pi * x)
    v = 1.0 + beta * np.cos(2 * pi * x)
    du = -alpha * pi * np.sin(pi * x)
    ddu = -alpha * pi**2 * np.cos(pi * x)
    dv = -2 * beta * pi * np.sin(2 * pi * x)
    ddv = -4 * beta * pi**2 * np.cos(2 * pi * x)
    source_u = -p.D1 * ddu + p.chi1 * (du * dv + u * ddv)
    source_v = -p.D2 * ddv - p.chi2 * (dv * du + v * ddu)

    def forcing(_t: float) -> tuple[np.ndarray, np.ndarray]:
        return source_u, source_v

    return u, v, forcing


def spatial_order(points: tuple[int, ...] = (16, 32, 64, 128)) -> float:
    p = Parameters(D1=1.0, D2=1.0, chi1=1.0, chi2=1.0, m1=1.0, m2=1.0)
    dt, steps = 1e-3, 50
    errors = []
    for n in points:
        grid = Grid((n,), (1.0,))
        u_exact, v_exact, forcing = manufactured_forcing(grid, p, 0.1, 0.1)
        u, v = _integrate(
            p, grid, u_exact, v_exact, Scheme.IMEX_EULER, dt, steps, forcing
        )
        errors.append(_l2_error(grid, u, v, u_exact, v_exact))
    return _observed_order([1.0 / n for n in points], errors)


def solver_orders(settings: AcceptanceSettings) -> tuple[bool, str]:
    t_end = settings.pick(1.0, 0.2)
    euler = temporal_order(Scheme.IMEX_EULER, t_end=t_end)
    strang = temporal_order(Scheme.STRANG_IMEX, t_end=t_end)
    space = spatial_order(settings.pick((16, 32, 64, 128), (16, 32, 64)))
    passed = (
        abs(euler - 1.0) <= 0.15
        and abs(strang - 2.0) <= 0.2
        and abs(space - 2.0) <= 0.1
    )
    return passed, (
        f"imex_euler {euler:.3f}, strang_imex {strang:.3f}, "
        f"space {space:.3f}"
    )


# ---------------------------------------------------------------------------
# Determinism
# ---------------------------------------------------------------------------

DETERMINISM_FILES = (
    "timeseries.csv",
    "couplings.csv",
    "inequality_ledger.csv",
    "fit.csv",
)


def determinism(settings: AcceptanceSettings) -> tuple[bool, str]:
    contents = []
    for _ in range(2):
        result = _run(
            settings,
            "determinism",
            COEXISTENCE,
            t_end=settings.pick(50.0, 5.0),
            points=settings.pick(128, 64),
            sample_every=0.02,
        )
        contents.append(
            {
                name: (result.directory / name).read_bytes()
                for name in DETERMINISM_FILES
                if (result.directory / name).exists()
            }
        )
    first, second = contents
    differing = sorted(
        name for name in first if first[name] != second.get(name)
    )
    passed = bool(first) and not differing and first.keys() == second.keys()
    return passed, f"{len(first)} files compared, differing {differing}"


Criterion = Callable[[AcceptanceSettings], tuple[bool, str]]

CRITERIA: dict[str, Criterion] = {
    "steady_state_oracle": steady_state_oracle,
    "cancellation_identities": cancellation_identities,
    "h1_conservation_decay": h1_conservation_decay,
    "coexistence_exponential": coexistence_exponential,
    "degenerate_algebraic": degenerate_algebraic,
    "strict_exclusion_exponential": strict_exclusion_exponential,
    "inequality_campaign": inequality_campaign,
    "solver_orders": solver_orders,
    "determinism": determinism,
}

# Wall-clock budgets in seconds; overruns are logged, not failed
BUDGETS = {
    "steady_state_oracle": 5.0,
    "cancellation_identities": 1.0,
    "h1_conservation_decay": 60.0,
    "coexistence_exponential": 60.0,
    "degenerate_algebraic": 300.0,
    "strict_exclusion_exponential": 60.0,
    "inequality_campaign": 30.0,
    "solver_orders": 120.0,
    "determinism": 120.0,
}
