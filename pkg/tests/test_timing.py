import logging

import pytest

from crosstaxis.cli.utils.timing import TimingMetrics


def test_stage_durations_sum_to_the_total():
    timing = TimingMetrics()
    timing.start()
    for stage in ("setup", "simulate", "write"):
        timing.mark(stage)
    durations = timing.durations()
    assert list(durations) == ["setup", "simulate", "write"]
    assert all(seconds >= 0 for seconds in durations.values())
    assert sum(durations.values()) == pytest.approx(timing.total)
    assert timing.total == timing.marks["write"]


def test_marks_before_start_are_ignored(caplog):
    timing = TimingMetrics()
    with caplog.at_level(logging.WARNING, logger="crosstaxis"):
        timing.mark("setup")
    assert timing.marks == {}
    assert timing.total == 0.0
    assert "ignoring stage setup" in caplog.text


def test_summary_lists_every_stage(caplog):
    timing = TimingMetrics("Run timings")
    timing.start()
    timing.mark("classify")
    timing.mark("fit")
    with caplog.at_level(logging.INFO, logger="crosstaxis"):
        timing.print_summary()
    assert "Run timings" in caplog.text
    assert "classify" in caplog.text
    assert "total" in caplog.text
