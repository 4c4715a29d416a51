import hashlib
import json
import logging
from time import perf_counter

from crosstaxis import persistence
from crosstaxis.cli.accept.criteria import (
    BUDGETS,
    CRITERIA,
    AcceptanceSettings,
    CriterionResult,
)
from crosstaxis.cli.utils import TimingMetrics, print_result

logger = logging.getLogger("crosstaxis")

ACCEPTANCE_FILE = "acceptance.csv"


def settings_hash(settings: AcceptanceSettings) -> str:
    canonical = json.dumps(
        {"seed": settings.seed, "quick": settings.quick}, sort_keys=True
    )
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def run_criterion(
    name: str, settings: AcceptanceSettings
) -> CriterionResult:
    """Run one criterion; an exception counts as a failure."""
    start = perf_counter()
    try:
        passed, detail = CRITERIA[name](settings)
    except (ValueError, RuntimeError) as e:
        logger.error(f"Criterion {name} raised: {e}")
        passed, detail = False, f"{type(e).__name__}: {e}"
    seconds = perf_counter() - start
    if seconds > BUDGETS[name]:
        logger.warning(
            f"Criterion {name} took {seconds:.1f}s, "
            f"budget {BUDGETS[name]:.0f}s"
        )
    return CriterionResult(name, passed, detail, seconds)


def run_acceptance(
    settings: AcceptanceSettings, names: list[str] | None = None
) -> list[CriterionResult]:
    """
    Run the acceptance criteria and write the pass/fail ledger.

    Args:
        settings: Output directory, seed and quick mode.
        names: Subset of criteria to run, all of them by default.

    Returns:
        One result per criterion, in the order they ran.
    """
    names = list(CRITERIA) if names is None else names
    unknown = [name for name in names if name not in CRITERIA]
    if unknown:
        raise ValueError(f"Unknown acceptance criteria: {unknown}")
    if settings.quick:
        logger.warning("Quick mode: shrunken runs, not an acceptance pass")

    timing = TimingMetrics("Acceptance stage timings")
    timing.start()
    settings.directory.mkdir(parents=True, exist_ok=True)
    results = []
    for name in names:
        logger.info(f"Running criterion {name}")
        result = run_criterion(name, settings)
        timing.mark(name)
        print_result(
            result.passed,
            f"{name:<30} {result.seconds:>8.2f}s  {result.detail}",
        )
        results.append(result)

    persistence.write_table_csv(
        settings.directory / ACCEPTANCE_FILE,
        ["criterion", "passed", "detail"],
        [[r.name, r.passed, r.detail] for r in results],
        settings_hash(settings),
    )
    timing.print_summary()
    return results


__all__ = [
    "ACCEPTANCE_FILE",
    "run_acceptance",
    "run_criterion",
    "settings_hash",
]
