import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crosstaxis.analysis import (
    RateModel,
    check_monotone_decay,
    check_ode_comparison,
    fit_algebraic,
    fit_exponential,
    noise_floor,
    reciprocal_r_squared,
    select_rate_model,
    tail_window,
)
from crosstaxis.errors import FitError
from crosstaxis.grid import Grid
from crosstaxis.model import RegimeTag, SteadyState

TIMES = np.linspace(0.0, 20.0, 81)


def test_exponential_fit_recovers_rate():
    fit = fit_exponential(TIMES, 3.0 * np.exp(-0.7 * TIMES))
    assert fit.K2 == pytest.approx(0.7, abs=1e-10)
    assert fit.K1 == pytest.approx(3.0, rel=1e-10)
    assert fit.residual < 1e-12
    assert fit.accepted


def test_algebraic_fit_recovers_rate():
    fit = fit_algebraic(TIMES, 1.0 / (2.0 + 0.3 * TIMES))
    assert fit.K2 == pytest.approx(0.3, abs=1e-10)
    assert fit.K1 == pytest.approx(0.5, rel=1e-10)


@pytest.mark.parametrize(
    "times, values",
    [
        (np.array([0.0, 1.0]), np.array([1.0, 0.5])),
        (TIMES, np.where(TIMES > 10, -1.0, 1.0)),
        (TIMES[::-1], np.exp(-TIMES)),
        (TIMES, np.full(TIMES.shape, np.nan)),
    ],
)
def test_unusable_series_rejected(times, values):
    with pytest.raises(FitError):
        fit_exponential(times, values)


def test_selection_prefers_the_true_law():
    exponential = select_rate_model(
        TIMES, np.exp(-0.5 * TIMES), RegimeTag.COEXISTENCE
    )
    assert exponential.winner is RateModel.EXPONENTIAL
    assert exponential.matches_prediction
    assert exponential.residual_ratio >= 10

    algebraic = select_rate_model(
        TIMES, 1.0 / (1.0 + TIMES), RegimeTag.DEGENERATE_EXCLUSION
    )
    assert algebraic.winner is RateModel.ALGEBRAIC
    assert algebraic.winning_fit.K2 == pytest.approx(1.0)
    assert algebraic.residual_ratio >= 10


def test_selection_follows_the_smaller_residual_at_any_margin():
    distances = 0.5 * np.exp(-0.3 * TIMES) + 0.5 / (1.0 + 0.3 * TIMES)
    selection = select_rate_model(TIMES, distances, RegimeTag.COEXISTENCE)
    fits = [selection.exponential, selection.algebraic]
    low, high = sorted(fit.residual for fit in fits)
    assert selection.winning_fit.residual == low
    assert selection.residual_ratio == pytest.approx(high / low)
    assert selection.residual_ratio >= 1.0


def test_mismatch_is_flagged_not_raised():
    selection = select_rate_model(
        TIMES, 1.0 / (1.0 + TIMES), RegimeTag.STRICT_EXCLUSION
    )
    assert selection.predicted is RateModel.EXPONENTIAL
    assert not selection.matches_prediction
    assert "winner: algebraic" in selection.summary()


def test_tail_window_drops_noise_floor_first():
    values = np.exp(-TIMES)
    floor = math.exp(-9.9)
    t, d = tail_window(TIMES, values, 0.5, floor=floor)
    assert np.all(d > floor)
    assert t[-1] < 10.0
    assert t.size == math.ceil(0.5 * np.count_nonzero(TIMES < 9.9))


def test_tail_fraction_must_be_positive():
    with pytest.raises(FitError):
        tail_window(TIMES, np.exp(-TIMES), 0.0)


def test_noise_floor_grows_with_resolution():
    s = SteadyState(1.0, 0.0)
    coarse = noise_floor(s, Grid((32,), (1.0,)))
    fine = noise_floor(s, Grid((64,), (1.0,)))
    assert 0 < coarse < fine < 1e-7


def test_monotone_decay_of_exponential():
    y = np.exp(-TIMES)
    assert check_monotone_decay(y, 1e-10).passed
    comparison = check_ode_comparison(TIMES, y)
    assert comparison.K2 == pytest.approx(0.5)


def test_monotone_decay_locates_a_bump():
    y = np.exp(-TIMES)
    y[40] = 2.0 * y[39]
    report = check_monotone_decay(y, 1e-10)
    assert not report.passed
    assert list(report.violations) == [40]
    assert report.max_rise == pytest.approx(y[39])


def test_reciprocal_r_squared():
    assert reciprocal_r_squared(TIMES, 1.0 / (1.0 + TIMES)) == pytest.approx(
        1.0
    )
    assert reciprocal_r_squared(TIMES, np.exp(-0.3 * TIMES)) < 0.99


@given(
    st.floats(min_value=0.05, max_value=2.0),
    st.floats(min_value=0.1, max_value=10.0),
)
@settings(max_examples=30)
def test_exponential_rate_is_recovered(rate, amplitude):
    fit = fit_exponential(TIMES, amplitude * np.exp(-rate * TIMES))
    assert fit.K2 == pytest.approx(rate, rel=1e-8)
