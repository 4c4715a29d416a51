import logging
from pathlib import Path

from crosstaxis import persistence
from crosstaxis.analysis import (
    DEFAULT_TAIL_FRACTION,
    RateSelection,
    select_rate_model,
)
from crosstaxis.model import RegimeTag

logger = logging.getLogger("crosstaxis")


def run_fit(
    series_path: str | Path,
    regime: RegimeTag,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    out_dir: str | Path | None = None,
) -> RateSelection:
    """
    Fit both decay laws to a recorded series and report the winner.

    The series is either a ``timeseries.csv`` written by a run or a two
    column ``t,d`` table. The report is written next to the series unless
    ``out_dir`` is given, and carries the series' config hash.

    Raises:
        FileNotFoundError: If ``series_path`` does not exist.
        FitError: If the series cannot be fitted.
    """
    series_path = Path(series_path)
    if not series_path.is_file():
        raise FileNotFoundError(f"Series file not found: {series_path}")
    digest = persistence.read_config_hash(series_path)
    times, distances = persistence.load_decay_series(series_path, digest)
    logger.info(f"Fitting {times.size} samples from {series_path}")

    selection = select_rate_model(
        times, distances, regime, tail_fraction=tail_fraction
    )
    directory = Path(out_dir) if out_dir is not None else series_path.parent
    directory.mkdir(parents=True, exist_ok=True)
    persistence.write_fit_report(
        directory, selection, digest, prefix=f"{series_path.stem}_"
    )
    return selection


__all__ = ["run_fit"]
