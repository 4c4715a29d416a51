import logging
from dataclasses import astuple, dataclass, fields
from multiprocessing import Pool
from pathlib import Path

from crosstaxis import persistence
from crosstaxis.cli.simulate import run_simulate
from crosstaxis.config import (
    ExperimentConfig,
    config_hash,
    has_key,
    with_values,
)
from crosstaxis.errors import StageError, ValidationError
from crosstaxis.model import classify_regime

logger = logging.getLogger("crosstaxis")

SWEEP_FILE = "sweep.csv"


@dataclass(frozen=True)
class SweepRow:
    """Outcome of one sweep point.

    Attributes:
        value: Value assigned to the swept key.
        regime: Regime tag, empty when the point failed validation.
        winner: Winning decay law, empty when no fit was made.
        K2: Rate of the winning fit, NaN when no fit was made.
        exit_status: ``ok``, ``eta_exit`` or ``failed:<stage>``.
        exit_time: First sample time outside the eta tube, NaN if none.
        error: Error message of a failed point.
    """

    value: float
    regime: str
    winner: str
    K2: float
    exit_status: str
    exit_time: float
    error: str


def sweep_key(axis: str) -> str:
    """Bare parameter names live in the parameters block."""
    return axis if "." in axis else f"parameters.{axis}"


def _failed(value: float, regime: str, stage: str, error: str) -> SweepRow:
    return SweepRow(
        value=value,
        regime=regime,
        winner="",
        K2=float("nan"),
        exit_status=f"failed:{stage}",
        exit_time=float("nan"),
        error=error,
    )


def _run_point(job: tuple[ExperimentConfig, str, float, str]) -> SweepRow:
    base, key, value, directory = job
    regime = ""
    try:
        config = with_values(
            base, {key: value, "outputs.directory": directory}
        )
        regime = classify_regime(config.parameters.to_parameters()).tag.value
        result = run_simulate(config)
    except StageError as e:
        logger.error(f"Sweep point {key}={value} failed: {e}")
        return _failed(value, regime, e.stage, str(e))
    except ValueError as e:
        logger.error(f"Sweep point {key}={value} is invalid: {e}")
        return _failed(value, regime, "setup", str(e))

    winner, k2 = "", float("nan")
    if result.selection is not None:
        winner = result.selection.winner.value
        k2 = result.selection.winning_fit.K2
    exit_time = result.exit_time
    return SweepRow(
        value=value,
        regime=regime,
        winner=winner,
        K2=k2,
        exit_status="ok" if exit_time is None else "eta_exit",
        exit_time=float("nan") if exit_time is None else exit_time,
        error="",
    )


def run_sweep(
    base: ExperimentConfig,
    axis: str,
    values: list[float],
    workers: int = 1,
) -> list[SweepRow]:
    """
    Run one experiment per value of ``axis`` and tabulate the outcomes.

    Each point writes into its own subdirectory of the base output
    directory. Failed points are recorded and the sweep continues.

    Args:
        base: Configuration shared by every point.
        axis: Dotted config key, or a bare parameter name such as lambda2.
        values: Values assigned to ``axis``, one run each.
        workers: Number of worker processes.

    Raises:
        ValidationError: If ``axis`` names no config key.
    """
    key = sweep_key(axis)
    if not has_key(base, key):
        raise ValidationError(f"Unknown sweep axis: {axis}")
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")

    root = Path(base.outputs.directory)
    root.mkdir(parents=True, exist_ok=True)
    leaf = key.rsplit(".", 1)[-1]
    jobs = [
        (base, key, value, str(root / f"{leaf}_{index:03d}"))
        for index, value in enumerate(values)
    ]
    logger.info(f"Sweeping {key} over {len(jobs)} values")

    if workers > 1 and len(jobs) > 1:
        with Pool(min(workers, len(jobs))) as pool:
            rows = pool.map(_run_point, jobs)
    else:
        rows = [_run_point(job) for job in jobs]

    persistence.write_table_csv(
        root / SWEEP_FILE,
        [f.name for f in fields(SweepRow)],
        [list(astuple(row)) for row in rows],
        config_hash(base),
    )
    failed = sum(row.exit_status.startswith("failed") for row in rows)
    if failed:
        logger.warning(f"{failed} of {len(rows)} sweep points failed")
    return rows


__all__ = [
    "SWEEP_FILE",
    "SweepRow",
    "run_sweep",
    "sweep_key",
]
