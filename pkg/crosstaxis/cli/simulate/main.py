import logging
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from crosstaxis import persistence
from crosstaxis.analysis import (
    RateSelection,
    check_monotone_decay,
    noise_floor,
    select_rate_model,
)
from crosstaxis.cli.utils import TimingMetrics
from crosstaxis.config import (
    ExperimentConfig,
    config_hash,
    config_to_dict,
    dump_config,
    with_values,
)
from crosstaxis.errors import FitError, StageError, ValidationError
from crosstaxis.functionals import (
    InequalityLedger,
    MassResidual,
    WeightSet,
    differential_inequality_residuals,
    mass_equation,
    mass_ode_residual,
    weights_for_regime,
)
from crosstaxis.inequalities import measured_poincare_constant
from crosstaxis.model import (
    Regime,
    RegimeTag,
    SteadyState,
    classify_regime,
    default_eta,
    jacobian_at_steady_state,
    steady_state,
)
from crosstaxis.solver import (
    SimState,
    TimeSeries,
    perturb_steady_state,
    simulate,
)

logger = logging.getLogger("crosstaxis")

# Relative tolerance of the monotone-decay check on y
MONOTONE_RTOL = 1e-10
MASS_RTOL = 1e-10


@dataclass
class ExperimentResult:
    """Outcome of one simulation run.

    Attributes:
        config: Echo of the validated configuration.
        config_hash: Hash embedded in every written file.
        directory: Output directory.
        regime: Regime of the parameters.
        steady: Steady state the run was perturbed from.
        weights: Weights of the composite functional.
        series: The recorded trajectory.
        files: Written artifacts by role.
        selection: Decay-law fits, when the series was long enough.
        ledger: Slack of the monitored energy inequalities.
        mass_residual: Mass ODE residual, where a mass law applies.
        checks: Named pass/fail flags.
    """

    config: dict
    config_hash: str
    directory: Path
    regime: Regime
    steady: SteadyState
    weights: WeightSet
    series: TimeSeries
    files: dict[str, Path] = field(default_factory=dict)
    selection: RateSelection | None = None
    ledger: InequalityLedger | None = None
    mass_residual: MassResidual | None = None
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def exit_time(self) -> float | None:
        return self.series.exit_time

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


@contextmanager
def stage(name: str, directory: Path, digest: str) -> Iterator[None]:
    """Name the failing stage and leave a failure marker behind."""
    try:
        yield
    except Exception as e:
        logger.error(f"Stage {name} failed: {e}")
        try:
            persistence.write_failure_marker(directory, name, str(e), digest)
        except OSError:
            logger.error(f"Could not write failure marker in {directory}")
        raise StageError(name, str(e)) from e


def resolve_weights(
    config: ExperimentConfig,
    p,
    s: SteadyState,
    regime: Regime,
    grid,
) -> WeightSet:
    source = config.monitoring.weights
    if isinstance(source, dict):
        try:
            return WeightSet(**source)
        except TypeError as e:
            raise ValidationError(f"Invalid explicit weights: {e}") from e
    poincare = None
    if regime.is_exclusion:
        poincare = measured_poincare_constant(grid)
    return weights_for_regime(p, s, regime, poincare)


def _resume_key(config: ExperimentConfig) -> str:
    """Hash of everything a continued run must share with its checkpoint."""
    return config_hash(
        with_values(
            config,
            {
                "stepping.t_end": 1.0,
                "outputs.directory": "",
                "outputs.snapshot_times": [],
                "log_level": "INFO",
            },
        )
    )


def _merge(previous: TimeSeries, current: TimeSeries) -> TimeSeries:
    """Append ``current`` to ``previous``; both share the checkpoint sample."""
    exit_time = previous.exit_time
    if exit_time is None:
        exit_time = current.exit_time
    return TimeSeries(
        records=previous.records + current.records[1:],
        couplings=previous.couplings + current.couplings[1:],
        snapshots=current.snapshots,
        exit_time=exit_time,
        clipped_mass=previous.clipped_mass + current.clipped_mass,
        final_state=current.final_state,
    )


def run_simulate(
    config: ExperimentConfig, resume: str | Path | None = None
) -> ExperimentResult:
    """
    Classify, perturb, simulate, monitor, fit and write one experiment.

    Args:
        config: Validated experiment configuration.
        resume: Directory of an earlier run whose checkpoint is continued
            up to ``config.stepping.t_end``.

    Raises:
        StageError: Naming the failing stage; the module error is chained.
    """
    timing = TimingMetrics("Simulation stage timings")
    timing.start()
    digest = config_hash(config)
    directory = Path(config.outputs.directory)
    directory.mkdir(parents=True, exist_ok=True)
    files: dict[str, Path] = {}

    with stage("setup", directory, digest):
        files["config"] = persistence.write_config_echo(
            directory, dump_config(config), digest
        )
        p = config.parameters.to_parameters()
        grid = config.grid.to_grid()
        ctl = config.stepping.to_step_control()

    with stage("classify", directory, digest):
        regime = classify_regime(p)
        s = steady_state(p, grid.volume)
        jac = jacobian_at_steady_state(p, s)
        logger.info(
            f"Regime {regime.tag.value}, steady state "
            f"({s.u_star:.6g}, {s.v_star:.6g})"
        )
        if not jac.weak_signs:
            raise ValidationError(
                f"Jacobian signs fu={jac.fu}, gv={jac.gv} are not <= 0"
            )
    timing.mark("classify")

    with stage("weights", directory, digest):
        weights = resolve_weights(config, p, s, regime, grid)
        eta = config.monitoring.eta or default_eta(s)
        logger.info(f"Weights {weights.as_dict()}, eta={eta:.6g}")

    previous: TimeSeries | None = None
    time_origin = 0.0
    with stage("perturb", directory, digest):
        if resume is None:
            initial = perturb_steady_state(
                s,
                grid,
                config.perturbation.epsilon,
                [m.to_mode_spec() for m in config.perturbation.modes],
                seed=config.perturbation.seed,
                regime=regime,
                fold_negative=config.perturbation.fold_negative,
            )
        else:
            initial, time_origin, previous = _load_resume(resume, config)
    timing.mark("perturb")

    with stage("simulate", directory, digest):
        series = simulate(
            initial,
            p,
            ctl,
            config.stepping.t_end,
            config.stepping.sample_every,
            eta,
            weights,
            steady=s,
            snapshot_times=config.outputs.snapshot_times,
            overflow_bound=config.stepping.overflow_bound,
            time_origin=time_origin,
        )
        if previous is not None:
            series = _merge(previous, series)
    timing.mark("simulate")

    with stage("write", directory, digest):
        ts_path, cpl_path = persistence.write_timeseries(
            directory, series, digest
        )
        files["timeseries"] = ts_path
        files["couplings"] = cpl_path
        snapshots = persistence.write_snapshots(
            directory, series.snapshots, digest
        )
        if snapshots is not None:
            files["snapshots"] = snapshots
        assert series.final_state is not None
        files["checkpoint"] = persistence.write_checkpoint(
            directory,
            series.final_state,
            {
                "resume_key": _resume_key(config),
                "scheme": ctl.scheme.value,
                "dt": ctl.dt,
                "seed": config.perturbation.seed,
            },
            digest,
            time_origin=time_origin,
            clipped_mass=series.clipped_mass,
            exit_time=series.exit_time,
        )
        if config.outputs.plot_scripts:
            files["plot"] = persistence.write_plot_script(
                directory, "timeseries", digest
            )

    result = ExperimentResult(
        config=config_to_dict(config),
        config_hash=digest,
        directory=directory,
        regime=regime,
        steady=s,
        weights=weights,
        series=series,
        files=files,
    )

    with stage("monitor", directory, digest):
        if len(series) >= 3:
            result.ledger = differential_inequality_residuals(
                series, p, s, weights, eta
            )
            files["ledger"] = persistence.write_ledger(
                directory, result.ledger, digest
            )
            if mass_equation(p) is None:
                logger.info("No mass law applies; no mass residual")
            else:
                try:
                    result.mass_residual = mass_ode_residual(series, p, s)
                except ValidationError as e:
                    logger.warning(f"Mass residual skipped: {e}")
            if result.mass_residual is not None:
                files["mass_residual"] = persistence.write_mass_residual(
                    directory, result.mass_residual, digest
                )
    timing.mark("monitor")

    with stage("fit", directory, digest):
        try:
            result.selection = select_rate_model(
                series.times,
                series.distances(),
                regime,
                tail_fraction=config.monitoring.tail_fraction,
                floor=noise_floor(s, grid),
            )
        except FitError as e:
            logger.warning(f"Decay fit rejected: {e}")
        if result.selection is not None:
            files["fit"] = persistence.write_fit_report(
                directory, result.selection, digest
            )
    timing.mark("fit")

    result.checks = _checks(result)
    if mass_equation(p) is not None:
        result.checks["mass_residual_recorded"] = (
            result.mass_residual is not None
        )
    timing.print_summary()
    return result


def _load_resume(
    resume: str | Path, config: ExperimentConfig
) -> tuple[SimState, float, TimeSeries]:
    checkpoint = persistence.load_checkpoint(resume)
    if checkpoint.metadata.get("resume_key") != _resume_key(config):
        raise ValidationError(
            f"Checkpoint in {resume} belongs to a different experiment"
        )
    if not config.stepping.t_end > checkpoint.state.t:
        raise ValidationError(
            f"t_end {config.stepping.t_end} does not extend the checkpoint "
            f"at t={checkpoint.state.t}"
        )
    digest = checkpoint.metadata["config_hash"]
    previous = persistence.load_timeseries(resume, digest)
    previous = TimeSeries(
        records=previous.records,
        couplings=previous.couplings,
        exit_time=checkpoint.exit_time,
        clipped_mass=checkpoint.clipped_mass,
    )
    logger.info(f"Resuming from t={checkpoint.state.t:.6g}")
    return checkpoint.state, checkpoint.time_origin, previous


def _checks(result: ExperimentResult) -> dict[str, bool]:
    series = result.series
    checks = {
        "exit_time_absent": series.exit_time is None,
        "clipping_free": series.clipped_mass == 0,
    }
    if result.selection is not None:
        checks["decay_law_matches_regime"] = (
            result.selection.matches_prediction
        )
    tag = result.regime.tag
    y = series.column("y")
    if tag in (RegimeTag.H1, RegimeTag.COEXISTENCE) and y.size > 1:
        if tag is RegimeTag.COEXISTENCE:
            # skip the transient ahead of the fit window
            tail = result.config["monitoring"]["tail_fraction"]
            y = y[y.size - int(np.ceil(tail * y.size)):]
        if y[0] > 0:
            report = check_monotone_decay(y, MONOTONE_RTOL)
            checks["y_nonincreasing"] = report.passed
    if tag is RegimeTag.H1:
        for name in ("mass_u", "mass_v"):
            mass = series.column(name)
            checks[f"{name}_conserved"] = bool(
                np.ptp(mass) <= MASS_RTOL * max(abs(mass[0]), 1.0)
            )
        for name, trivial in (
            ("u", result.regime.trivial_u),
            ("v", result.regime.trivial_v),
        ):
            if trivial:
                checks[f"trivial_{name}_zero"] = bool(
                    np.all(series.column(f"l1_{name}") == 0)
                )
    return checks


__all__ = [
    "ExperimentResult",
    "resolve_weights",
    "run_simulate",
    "stage",
]
