import logging
import sys
from functools import wraps
from pathlib import Path

import click

from crosstaxis.cli import (
    AcceptanceSettings,
    print_blue,
    print_red,
    print_result,
    run_acceptance,
    run_fit,
    run_inequalities,
    run_simulate,
    run_sweep,
)
from crosstaxis.config import ExperimentConfig, load_config, parse_scalar
from crosstaxis.errors import StageError
from crosstaxis.model import RegimeTag, classify_regime, steady_state

logger = logging.getLogger("crosstaxis")

EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_ACCEPTANCE = 3


def configure_logging(level: str) -> None:
    """
    Configure logging for one command.

    Args:
        level: Log level name, usually the config's ``log_level``.
    """
    logging.basicConfig(
        level=level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


def exit_code(error: BaseException) -> int:
    """Validation errors exit 1, everything else 2."""
    if isinstance(error, StageError) and error.__cause__ is not None:
        error = error.__cause__
    if isinstance(error, ValueError):
        return EXIT_VALIDATION
    return EXIT_RUNTIME


def handle_errors(func):
    """Map exceptions of a command onto the documented exit codes."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
            print_red(f"I/O error: {e}")
            sys.exit(EXIT_RUNTIME)
        except (ValueError, RuntimeError, OSError) as e:
            code = exit_code(e)
            kind = "Validation error" if code == EXIT_VALIDATION else "Error"
            print_red(f"{kind}: {e}")
            sys.exit(code)

    return wrapper


# Options shared by every config-driven command
COMMON_OPTIONS = [
    click.option(
        "-c",
        "--config",
        "config_path",
        type=click.Path(),
        required=False,
        help="Path to the experiment configuration file",
    ),
    click.option(
        "-o",
        "--out",
        type=click.Path(file_okay=False),
        required=False,
        help="Output directory (overrides outputs.directory)",
    ),
    click.option(
        "--seed",
        type=int,
        required=False,
        help="Seed of the perturbation and of the inequality samples",
    ),
    click.option(
        "--override",
        "overrides",
        type=str,
        multiple=True,
        help="Dotted KEY=VALUE config assignment, e.g. parameters.chi1=2",
    ),
]


def add_common_options(func):
    """Decorator to add common CLI options to a command."""
    for option in reversed(COMMON_OPTIONS):
        func = option(func)
    return func


def load_experiment(
    config_path: str | None,
    out: str | None,
    seed: int | None,
    overrides: tuple[str, ...],
) -> ExperimentConfig:
    """Load the config, apply shorthands and overrides, set up logging."""
    assignments = list(overrides)
    if out is not None:
        assignments.append(f"outputs.directory={out}")
    if seed is not None:
        assignments.append(f"perturbation.seed={seed}")
        assignments.append(f"inequalities.seed={seed}")
    config = load_config(config_path, assignments)
    configure_logging(config.log_level)
    return config


@click.group()
def cli():
    pass


@cli.command()
@add_common_options
@handle_errors
def classify(
    config_path: str | None,
    out: str | None,
    seed: int | None,
    overrides: tuple[str, ...],
) -> None:
    """Print the regime and steady state of the configured parameters."""
    config = load_experiment(config_path, out, seed, overrides)
    p = config.parameters.to_parameters()
    regime = classify_regime(p)
    s = steady_state(p, config.grid.to_grid().volume)
    print_blue(f"regime: {regime.tag.value}")
    print(f"discriminant: {regime.discriminant:.17g}")
    print(f"steady state: ({s.u_star:.17g}, {s.v_star:.17g})")


@cli.command()
@add_common_options
@click.option(
    "--resume",
    type=click.Path(file_okay=False),
    required=False,
    help="Continue the checkpoint in this run directory up to t_end",
)
@handle_errors
def simulate(
    config_path: str | None,
    out: str | None,
    seed: int | None,
    overrides: tuple[str, ...],
    resume: str | None,
) -> None:
    """Simulate one experiment and fit its decay law."""
    config = load_experiment(config_path, out, seed, overrides)
    logger.info(f"Running experiment {config.name}...")
    result = run_simulate(config, resume=resume)
    if result.selection is not None:
        print(result.selection.summary())
    for name, passed in result.checks.items():
        print_result(passed, name)
    print(f"outputs: {result.directory}")


@cli.command()
@add_common_options
@click.option(
    "--axis",
    type=str,
    required=True,
    help="Parameter name or dotted config key to sweep",
)
@click.option(
    "--values",
    type=str,
    required=True,
    help="Comma separated values, e.g. 0.2,0.5,1.0 (may be empty)",
)
@click.option(
    "--workers",
    type=int,
    default=1,
    show_default=True,
    help="Number of worker processes",
)
@handle_errors
def sweep(
    config_path: str | None,
    out: str | None,
    seed: int | None,
    overrides: tuple[str, ...],
    axis: str,
    values: str,
    workers: int,
) -> None:
    """Run one experiment per value of a parameter."""
    config = load_experiment(config_path, out, seed, overrides)
    points = [parse_scalar(item) for item in values.split(",") if item]
    rows = run_sweep(config, axis, points, workers=workers)
    for row in rows:
        line = (
            f"{row.value!s:<10} {row.regime:<22} {row.winner:<12} "
            f"K2={row.K2:.4g} {row.exit_status}"
        )
        print_result(not row.exit_status.startswith("failed"), line)


@cli.command()
@add_common_options
@handle_errors
def inequalities(
    config_path: str | None,
    out: str | None,
    seed: int | None,
    overrides: tuple[str, ...],
) -> None:
    """Estimate the constants of the functional inequalities."""
    config = load_experiment(config_path, out, seed, overrides)
    reports = run_inequalities(config)
    for name, report in reports.items():
        print(
            f"{name:<20} max {report.max_ratio:.6g} at "
            f"{report.argmax_label:<12} refined x"
            f"{report.refinement_trend:.4f}"
        )


@cli.command()
@click.option(
    "-s",
    "--series",
    type=click.Path(),
    required=True,
    help="timeseries.csv of a run, or a CSV with columns t,d",
)
@click.option(
    "--regime",
    type=click.Choice([tag.value for tag in RegimeTag]),
    required=True,
    help="Regime whose decay law is predicted",
)
@click.option(
    "--tail-fraction",
    type=float,
    default=0.8,
    show_default=True,
    help="Share of samples, counted from the end, used in the fits",
)
@click.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False),
    required=False,
    help="Directory of the fit report (default: next to the series)",
)
@click.option("--log-level", type=str, default="INFO", show_default=True)
@handle_errors
def fit(
    series: str,
    regime: str,
    tail_fraction: float,
    out: str | None,
    log_level: str,
) -> None:
    """Fit exponential and algebraic decay to a recorded series."""
    configure_logging(log_level)
    selection = run_fit(series, RegimeTag(regime), tail_fraction, out)
    print(selection.summary())
    print_result(selection.matches_prediction, "decay_law_matches_regime")


@cli.command()
@click.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False),
    default="acceptance",
    show_default=True,
    help="Directory of the acceptance runs",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--quick",
    is_flag=True,
    help="Shrunken smoke run; not an acceptance pass",
)
@click.option(
    "--criterion",
    "criteria",
    type=str,
    multiple=True,
    help="Run only this criterion (repeatable)",
)
@click.option("--log-level", type=str, default="INFO", show_default=True)
@handle_errors
def accept(
    out: str,
    seed: int,
    quick: bool,
    criteria: tuple[str, ...],
    log_level: str,
) -> None:
    """Run the acceptance suite; exit 3 if any criterion fails."""
    configure_logging(log_level)
    settings = AcceptanceSettings(Path(out), seed=seed, quick=quick)
    results = run_acceptance(settings, list(criteria) or None)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print_red(f"{len(failed)} criteria failed: {', '.join(failed)}")
        sys.exit(EXIT_ACCEPTANCE)
    print_blue(f"All {len(results)} criteria passed")


if __name__ == "__main__":
    cli()
