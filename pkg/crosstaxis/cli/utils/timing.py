import logging
from itertools import pairwise
from time import perf_counter

logger = logging.getLogger("crosstaxis")

RULE_WIDTH = 60


class TimingMetrics:
    """Wall-clock durations of the stages of one command.

    Durations are logged only; they never reach data files.
    """

    def __init__(self, title: str = "Stage timings"):
        self.title = title
        self.marks: dict[str, float] = {}
        self.start_time: float | None = None

    def start(self) -> None:
        self.start_time = perf_counter()
        self.marks.clear()

    def mark(self, stage: str) -> None:
        """Record the end of ``stage``, measured from :meth:`start`."""
        if self.start_time is None:
            logger.warning(f"Timing not started, ignoring stage {stage}")
            return
        self.marks[stage] = perf_counter() - self.start_time

    @property
    def total(self) -> float:
        return max(self.marks.values(), default=0.0)

    def durations(self) -> dict[str, float]:
        """Per-stage durations; they sum to :attr:`total`."""
        ends = [0.0, *self.marks.values()]
        return {
            stage: end - begin
            for stage, (begin, end) in zip(self.marks, pairwise(ends))
        }

    def print_summary(self) -> None:
        if not self.marks:
            logger.info("No stage timings recorded")
            return
        total = self.total
        logger.info(self.title)
        logger.info("-" * RULE_WIDTH)
        for stage, seconds in self.durations().items():
            share = seconds / total if total > 0 else 0.0
            logger.info(f"{stage:<36} {seconds:9.4f}s {share:7.1%}")
        logger.info("-" * RULE_WIDTH)
        logger.info(f"{'total':<36} {total:9.4f}s")
