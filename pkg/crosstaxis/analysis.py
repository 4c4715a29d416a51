"""Decay-law fits and monotonicity checks for recorded trajectories."""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from crosstaxis.errors import FitError
from crosstaxis.grid import Grid
from crosstaxis.model import Regime, RegimeTag, SteadyState

logger = logging.getLogger("crosstaxis")

MIN_SAMPLES = 10
DEFAULT_TAIL_FRACTION = 0.8
NOISE_FLOOR_RTOL = 1e-13


class RateModel(Enum):
    EXPONENTIAL = "exponential"
    ALGEBRAIC = "algebraic"


@dataclass(frozen=True)
class RateFit:
    """Affine least-squares fit in transformed coordinates.

    Attributes:
        model: Decay law that was fitted.
        K1: Amplitude; the fitted prefactor K1 * epsilon.
        K2: Rate parameter in 1/time.
        residual: RMS misfit in transformed coordinates over their range.
        window: First and last fitted time.
        samples: Number of fitted samples.
    """

    model: RateModel
    K1: float
    K2: float
    residual: float
    window: tuple[float, float]
    samples: int

    @property
    def accepted(self) -> bool:
        return self.K2 > 0


@dataclass(frozen=True)
class RateSelection:
    """Both fits on the tail window and the model they favour."""

    exponential: RateFit
    algebraic: RateFit
    winner: RateModel
    predicted: RateModel
    residual_ratio: float

    @property
    def matches_prediction(self) -> bool:
        return self.winner is self.predicted

    @property
    def winning_fit(self) -> RateFit:
        if self.winner is RateModel.EXPONENTIAL:
            return self.exponential
        return self.algebraic

    def summary(self) -> str:
        lines = [
            f"window: [{self.exponential.window[0]:.6g}, "
            f"{self.exponential.window[1]:.6g}] "
            f"({self.exponential.samples} samples)",
        ]
        for fit in (self.exponential, self.algebraic):
            lines.append(
                f"{fit.model.value:<12} K1={fit.K1:.6g} K2={fit.K2:.6g} "
                f"residual={fit.residual:.3e}"
            )
        lines.append(
            f"winner: {self.winner.value} (residual ratio "
            f"{self.residual_ratio:.3g}), predicted: {self.predicted.value}"
        )
        return "\n".join(lines)


@dataclass(frozen=True)
class MonotoneReport:
    passed: bool
    violations: np.ndarray
    max_rise: float


@dataclass(frozen=True)
class OdeComparison:
    """Endpoint rate K2 and the slack y' + 2 K2 y per sample."""

    K2: float
    slack: np.ndarray

    @property
    def max_slack(self) -> float:
        return float(np.max(self.slack)) if self.slack.size else 0.0

    def passed(self, tolerance: float) -> bool:
        return self.max_slack <= tolerance


def _validate(times, values) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(times, dtype=float)
    d = np.asarray(values, dtype=float)
    if t.shape != d.shape or t.ndim != 1:
        raise FitError("times and values must be 1-D arrays of equal length")
    if t.size < MIN_SAMPLES:
        raise FitError(
            f"Need at least {MIN_SAMPLES} samples, got {t.size}"
        )
    if not np.all(np.isfinite(d)) or np.any(d <= 0):
        raise FitError("Decay series must be finite and strictly positive")
    if np.any(np.diff(t) <= 0):
        raise FitError("Sample times must be strictly increasing")
    return t, d


def _relative_rms(observed: np.ndarray, fitted: np.ndarray) -> float:
    spread = float(np.ptp(observed))
    if spread == 0:
        return 0.0
    return float(np.sqrt(np.mean((observed - fitted) ** 2))) / spread


def fit_exponential(times, distances) -> RateFit:
    """Fit d = K1 exp(-K2 t) by least squares of log d against t.

    Raises:
        FitError: On non-positive values or too few samples.
    """
    t, d = _validate(times, distances)
    transformed = np.log(d)
    line = stats.linregress(t, transformed)
    return RateFit(
        model=RateModel.EXPONENTIAL,
        K1=math.exp(line.intercept),
        K2=-float(line.slope),
        residual=_relative_rms(transformed, line.intercept + line.slope * t),
        window=(float(t[0]), float(t[-1])),
        samples=int(t.size),
    )


def fit_algebraic(times, distances) -> RateFit:
    """Fit d = (1 / K1 + K2 t)^-1 by least squares of 1/d against t.

    Raises:
        FitError: On non-positive values or too few samples.
    """
    t, d = _validate(times, distances)
    transformed = 1.0 / d
    line = stats.linregress(t, transformed)
    intercept = float(line.intercept)
    return RateFit(
        model=RateModel.ALGEBRAIC,
        K1=1.0 / intercept if intercept != 0 else math.inf,
        K2=float(line.slope),
        residual=_relative_rms(transformed, intercept + line.slope * t),
        window=(float(t[0]), float(t[-1])),
        samples=int(t.size),
    )


def noise_floor(s: SteadyState, grid: Grid) -> float:
    """W22 distance below which samples are rounding noise around ``s``.

    Rounding of the fields is amplified by the discrete Laplacian, whose
    largest eigenvalue is sum_k 4 / h_k^2.
    """
    amplification = 1.0 + sum(4.0 / h**2 for h in grid.spacing)
    level = NOISE_FLOOR_RTOL * (s.u_star + s.v_star + 1.0)
    return level * amplification * math.sqrt(grid.volume)


def tail_window(
    times,
    values,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    floor: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Samples above ``floor``, then the last ``tail_fraction`` of them."""
    if not 0 < tail_fraction <= 1:
        raise FitError(
            f"tail_fraction must lie in (0, 1], got {tail_fraction}"
        )
    t = np.asarray(times, dtype=float)
    d = np.asarray(values, dtype=float)
    keep = d > floor
    dropped = int(np.count_nonzero(~keep))
    if dropped:
        logger.info(
            f"Dropped {dropped} samples at the noise floor {floor:.3e}"
        )
    t, d = t[keep], d[keep]
    start = t.size - int(math.ceil(tail_fraction * t.size))
    return t[start:], d[start:]


def select_rate_model(
    times,
    distances,
    regime: Regime | RegimeTag,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    floor: float = 0.0,
) -> RateSelection:
    """Fit both decay laws on the tail window and pick the smaller residual.

    Exponential decay is predicted everywhere except the degenerate exclusion
    regime. A winner that contradicts the prediction is logged, not raised.
    """
    tag = regime.tag if isinstance(regime, Regime) else regime
    t, d = tail_window(times, distances, tail_fraction, floor)
    exponential = fit_exponential(t, d)
    algebraic = fit_algebraic(t, d)

    if algebraic.residual < exponential.residual:
        winner, low, high = RateModel.ALGEBRAIC, algebraic, exponential
    else:
        winner, low, high = RateModel.EXPONENTIAL, exponential, algebraic
    if low.residual > 0:
        ratio = high.residual / low.residual
    else:
        ratio = math.inf if high.residual > 0 else 1.0

    predicted = (
        RateModel.ALGEBRAIC
        if tag is RegimeTag.DEGENERATE_EXCLUSION
        else RateModel.EXPONENTIAL
    )
    selection = RateSelection(
        exponential=exponential,
        algebraic=algebraic,
        winner=winner,
        predicted=predicted,
        residual_ratio=ratio,
    )
    if selection.matches_prediction:
        logger.info(
            f"Selected {winner.value} decay, K2={low.K2:.6g}, "
            f"residual ratio {ratio:.3g}"
        )
    else:
        logger.warning(
            f"Observed {winner.value} decay but {tag.value} predicts "
            f"{predicted.value}"
        )
    return selection


def check_monotone_decay(y, tolerance: float) -> MonotoneReport:
    """Flag each sample rising above its predecessor by tolerance * y(0)."""
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        return MonotoneReport(True, np.array([], dtype=int), 0.0)
    rises = np.diff(y)
    violations = np.flatnonzero(rises > tolerance * y[0]) + 1
    return MonotoneReport(
        passed=violations.size == 0,
        violations=violations,
        max_rise=float(np.max(rises)),
    )


def check_ode_comparison(times, y) -> OdeComparison:
    """K2 from the endpoints, then y' + 2 K2 y by central differences.

    K2 = ln(y(0) / y(end)) / (2 (t_end - t_0)), the rate for which
    y(t) <= exp(-2 K2 t) y(0) is sharp at the endpoints.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size < 3 or t.shape != y.shape:
        raise FitError("ODE comparison needs at least three aligned samples")
    if y[0] <= 0 or y[-1] <= 0:
        raise FitError("ODE comparison needs positive endpoint values")
    k2 = math.log(y[0] / y[-1]) / (2.0 * (t[-1] - t[0]))
    derivative = np.gradient(y, t, edge_order=2)
    return OdeComparison(K2=k2, slack=derivative + 2.0 * k2 * y)


def reciprocal_r_squared(times, values) -> float:
    """Coefficient of determination of 1/values regressed on times."""
    t, d = _validate(times, values)
    line = stats.linregress(t, 1.0 / d)
    return float(line.rvalue**2)


__all__ = [
    "MIN_SAMPLES",
    "DEFAULT_TAIL_FRACTION",
    "RateModel",
    "RateFit",
    "RateSelection",
    "MonotoneReport",
    "OdeComparison",
    "fit_exponential",
    "fit_algebraic",
    "noise_floor",
    "tail_window",
    "select_rate_model",
    "check_monotone_decay",
    "check_ode_comparison",
    "reciprocal_r_squared",
]
