import logging
from pathlib import Path

from crosstaxis import persistence
from crosstaxis.cli.simulate import stage
from crosstaxis.cli.utils import TimingMetrics
from crosstaxis.config import ExperimentConfig, config_hash, dump_config
from crosstaxis.inequalities import (
    RatioReport,
    estimate_constants,
    measured_poincare_constant,
)

logger = logging.getLogger("crosstaxis")


def run_inequalities(config: ExperimentConfig) -> dict[str, RatioReport]:
    """
    Sample every inequality ratio on the campaign grid and its refinement.

    Writes one ``ratios_<id>.csv`` per inequality into the output
    directory, next to the config echo and an optional plot script.
    """
    timing = TimingMetrics("Inequality campaign timings")
    timing.start()
    settings = config.inequalities
    digest = config_hash(config)
    directory = Path(config.outputs.directory)
    directory.mkdir(parents=True, exist_ok=True)

    with stage("setup", directory, digest):
        persistence.write_config_echo(directory, dump_config(config), digest)
        spec = settings.to_spec()
        grid = settings.to_grid()

    with stage("sample", directory, digest):
        poincare = measured_poincare_constant(grid)
        logger.info(f"Measured Poincare constant {poincare:.6g}")
        reports = estimate_constants(
            spec, grid, include_hessian=settings.include_hessian
        )
    timing.mark("sample")

    with stage("write", directory, digest):
        persistence.write_ratio_reports(directory, reports, spec, digest)
        if config.outputs.plot_scripts:
            persistence.write_plot_script(directory, "ratios", digest)
    timing.mark("write")

    timing.print_summary()
    return reports


__all__ = ["run_inequalities"]
