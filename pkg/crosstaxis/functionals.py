"""Energy functionals, regime weights and differential-inequality monitors.

The composite Lyapunov functional is

    y = phi(u - u*; A1, B1, C1) + phi(v - v*; A2, B2, C2)
    phi(f; A, B, C) = A/2 int f^2 + B/2 int |grad f|^2 + C/2 int |lap f|^2

with weights chosen per regime so that the linear taxis and predation
couplings cancel.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from crosstaxis.errors import ValidationError
from crosstaxis.grid import (
    Field,
    apply_laplacian,
    face_inner,
    integrate,
    norms,
)
from crosstaxis.model import (
    Parameters,
    Regime,
    RegimeTag,
    SteadyState,
    classify_regime,
    jacobian_at_steady_state,
)

if TYPE_CHECKING:
    from crosstaxis.solver.state import SimState, TimeSeries

logger = logging.getLogger("crosstaxis")

WEIGHT_NAMES = ("A1", "A2", "B1", "B2", "C1", "C2")


@dataclass(frozen=True)
class WeightSet:
    """Weights of the composite functional.

    Attributes:
        A1, A2: L2 weights for u and v.
        B1, B2: Gradient weights.
        C1, C2: Laplacian weights.
        X2: Weight of the v-mass term in the degenerate exclusion regime.
        unused: Names of weights the regime does not use.
    """

    A1: float
    A2: float
    B1: float
    B2: float
    C1: float
    C2: float
    X2: float | None = None
    unused: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for name in WEIGHT_NAMES:
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValidationError(
                    f"Weight {name} must be finite and >= 0, got {value}"
                )
            object.__setattr__(self, name, value)
        if self.X2 is not None:
            if not math.isfinite(self.X2) or self.X2 < 0:
                raise ValidationError("Weight X2 must be finite and >= 0")
            object.__setattr__(self, "X2", float(self.X2))
        object.__setattr__(self, "unused", frozenset(self.unused))

    def as_dict(self) -> dict[str, float | None]:
        data: dict[str, float | None] = {
            name: getattr(self, name) for name in WEIGHT_NAMES
        }
        data["X2"] = self.X2
        return data


@dataclass(frozen=True)
class FunctionalRecord:
    """Energies and distances of one sample; CSV column order follows."""

    t: float
    e_u0: float
    e_v0: float
    e_u1: float
    e_v1: float
    e_u2: float
    e_v2: float
    y: float
    mass_u: float
    mass_v: float
    w22_u: float
    w22_v: float


@dataclass(frozen=True)
class CouplingRecord:
    """Cross integrals and higher energies of one sample.

    Attributes:
        cross0: int (u - u*)(v - v*).
        cross1: int grad u . grad v.
        cross2: int lap u lap v.
        cross3: int grad lap u . grad lap v.
        e_u3, e_v3: int |grad lap u|^2 and int |grad lap v|^2.
        int_u2, int_v2, int_uv: int u^2, int v^2, int u v.
        l1_u, l1_v: int |u| and int |v|.
        linf_u, linf_v: max |u - u*| and max |v - v*|.
    """

    t: float
    cross0: float
    cross1: float
    cross2: float
    cross3: float
    e_u3: float
    e_v3: float
    int_u2: float
    int_v2: float
    int_uv: float
    l1_u: float
    l1_v: float
    linf_u: float
    linf_v: float


@dataclass(frozen=True)
class MassResidual:
    """Mass ODE residual per sample."""

    equation: str
    times: np.ndarray
    derivative: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray

    def norm(self, interior_only: bool = True) -> float:
        """Root mean square residual, by default without the endpoints."""
        values = self.residual[1:-1] if interior_only else self.residual
        if values.size == 0:
            return 0.0
        return float(np.sqrt(np.mean(values**2)))


@dataclass(frozen=True)
class InequalityLedger:
    """Signed slack LHS - RHS of every monitored inequality per sample."""

    times: np.ndarray
    slack: dict[str, np.ndarray]
    applicable: dict[str, np.ndarray]
    eta: float

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.slack)

    def max_slack(self, inequality_id: str) -> float:
        mask = self.applicable[inequality_id]
        if not mask.any():
            return math.nan
        return float(np.max(self.slack[inequality_id][mask]))

    def violations(self, inequality_id: str, tolerance: float) -> np.ndarray:
        """Sample indices whose applicable slack exceeds ``tolerance``."""
        mask = self.applicable[inequality_id]
        return np.flatnonzero(mask & (self.slack[inequality_id] > tolerance))


def weights_for_regime(
    p: Parameters,
    s: SteadyState,
    r: Regime,
    poincare_constant: float | None = None,
) -> WeightSet:
    """Weights for which the composite functional decays in regime ``r``.

    Args:
        p: Model coefficients.
        s: Steady state of ``p``.
        r: Regime of ``p``.
        poincare_constant: Measured discrete Poincare constant of the active
            grid. Required in the exclusion regimes.

    Raises:
        ValidationError: If the steady state contradicts the regime or the
            Poincare constant is missing where needed.
    """
    u, v = s.u_star, s.v_star
    if r.is_exclusion and v > 0:
        raise ValidationError(
            f"v_star = {v} > 0 is inconsistent with {r.tag.value}"
        )
    if r.tag is RegimeTag.COEXISTENCE and v <= 0:
        raise ValidationError("Coexistence requires v_star > 0")

    if r.tag is RegimeTag.H1:
        first = p.chi2 * v
        second = p.chi1 * u
        unused = set()
        if r.trivial_u or r.trivial_v:
            logger.info("Trivial component under H1, weights degenerate")
            unused = {
                name
                for name, value in zip(
                    WEIGHT_NAMES, (first, second) * 3
                )
                if value == 0
            }
        return WeightSet(
            A1=first,
            B1=first,
            C1=first,
            A2=second,
            B2=second,
            C2=second,
            unused=frozenset(unused),
        )

    if r.tag is RegimeTag.COEXISTENCE:
        return WeightSet(
            A1=p.a2 * v,
            A2=p.a1 * u,
            B1=(p.a2 + p.chi2) * v,
            B2=(p.a1 + p.chi1) * u,
            C1=p.chi2 * v,
            C2=p.chi1 * u,
        )

    if poincare_constant is None or not poincare_constant > 0:
        raise ValidationError(
            "Exclusion weights need a positive measured Poincare constant"
        )
    d_product = p.D1 * p.D2
    c2 = (
        16.0
        * max(poincare_constant**2 * p.a1**2, p.chi1**2)
        * (u + 1.0) ** 2
        / d_product
    )

    if r.tag is RegimeTag.STRICT_EXCLUSION:
        jac = jacobian_at_steady_state(p, s)
        rate = 0.5 * min(-jac.fu, -jac.gv)
        a2_weight = max(p.a1**2 / rate**2, p.chi1**2 / d_product) * u**2
        return WeightSet(
            A1=1.0,
            A2=a2_weight,
            B1=0.0,
            B2=0.0,
            C1=1.0,
            C2=c2,
            unused=frozenset({"B1", "B2"}),
        )

    return WeightSet(
        A1=1.0,
        A2=p.chi1**2 * u**2 / d_product,
        B1=0.0,
        B2=0.0,
        C1=1.0,
        C2=c2,
        X2=p.a1 * u / p.a2,
        unused=frozenset({"B1", "B2"}),
    )


def cancellation_residuals(
    w: WeightSet, p: Parameters, s: SteadyState
) -> tuple[float, float, float, float]:
    """Coefficients of the cross terms that the weights should cancel."""
    u, v = s.u_star, s.v_star
    return (
        w.A1 * p.a1 * u - w.A2 * p.a2 * v,
        (w.A1 * p.chi1 + w.B1 * p.a1) * u - (w.A2 * p.chi2 + w.B2 * p.a2) * v,
        (w.B1 * p.chi1 + w.C1 * p.a1) * u - (w.B2 * p.chi2 + w.C2 * p.a2) * v,
        w.C1 * p.chi1 * u - w.C2 * p.chi2 * v,
    )


def phi_abc(f: Field, A: float, B: float, C: float) -> float:
    """A/2 int f^2 + B/2 int |grad f|^2 + C/2 int |lap f|^2."""
    bundle = norms(f)
    return 0.5 * (
        A * bundle.l2**2
        + B * bundle.h1_seminorm**2
        + C * bundle.laplacian_l2**2
    )


def composite_value(
    w: WeightSet,
    e_u0: float,
    e_u1: float,
    e_u2: float,
    e_v0: float,
    e_v1: float,
    e_v2: float,
):
    """y from precomputed energies; works on scalars and arrays."""
    return 0.5 * (
        w.A1 * e_u0
        + w.B1 * e_u1
        + w.C1 * e_u2
        + w.A2 * e_v0
        + w.B2 * e_v1
        + w.C2 * e_v2
    )


def record(
    state: "SimState", s: SteadyState, w: WeightSet
) -> FunctionalRecord:
    """Functional values of ``state`` relative to the steady state."""
    du = state.u - s.u_star
    dv = state.v - s.v_star
    nu = norms(du)
    nv = norms(dv)
    e_u0, e_v0 = nu.l2**2, nv.l2**2
    e_u1, e_v1 = nu.h1_seminorm**2, nv.h1_seminorm**2
    e_u2, e_v2 = nu.laplacian_l2**2, nv.laplacian_l2**2
    return FunctionalRecord(
        t=state.t,
        e_u0=e_u0,
        e_v0=e_v0,
        e_u1=e_u1,
        e_v1=e_v1,
        e_u2=e_u2,
        e_v2=e_v2,
        y=composite_value(w, e_u0, e_u1, e_u2, e_v0, e_v1, e_v2),
        mass_u=integrate(state.u),
        mass_v=integrate(state.v),
        w22_u=nu.w22_equiv,
        w22_v=nv.w22_equiv,
    )


def couplings(state: "SimState", s: SteadyState) -> CouplingRecord:
    grid = state.u.grid
    u = state.u.values
    v = state.v.values
    du = u - s.u_star
    dv = v - s.v_star
    lap_u = apply_laplacian(u, grid)
    lap_v = apply_laplacian(v, grid)
    volume = grid.cell_volume
    return CouplingRecord(
        t=state.t,
        cross0=float(np.sum(du * dv)) * volume,
        cross1=face_inner(u, v, grid),
        cross2=float(np.sum(lap_u * lap_v)) * volume,
        cross3=face_inner(lap_u, lap_v, grid),
        e_u3=face_inner(lap_u, lap_u, grid),
        e_v3=face_inner(lap_v, lap_v, grid),
        int_u2=float(np.sum(u * u)) * volume,
        int_v2=float(np.sum(v * v)) * volume,
        int_uv=float(np.sum(u * v)) * volume,
        l1_u=float(np.sum(np.abs(u))) * volume,
        l1_v=float(np.sum(np.abs(v))) * volume,
        linf_u=float(np.max(np.abs(du))),
        linf_v=float(np.max(np.abs(dv))),
    )


def _column(items, name: str) -> np.ndarray:
    return np.array([getattr(item, name) for item in items], dtype=float)


def _uniform_prefix(times: np.ndarray) -> int:
    """Number of leading samples on a uniform cadence.

    A shorter final interval (t_end off the sampling cadence) is dropped.
    """
    if times.size < 3:
        raise ValidationError("Mass residuals need at least three samples")
    steps = np.diff(times)
    count = times.size
    if not np.isclose(steps[-1], steps[0], rtol=1e-9, atol=0.0):
        count -= 1
        logger.warning(
            f"Dropping the final sample at t={times[-1]:.6g} from the mass "
            f"residual: its interval {steps[-1]:.6g} is off the cadence "
            f"{steps[0]:.6g}"
        )
    if count < 3 or not np.allclose(
        steps[: count - 1], steps[0], rtol=1e-9, atol=0.0
    ):
        raise ValidationError("Mass residuals need uniformly spaced samples")
    return count


def _time_derivative(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    if times.size < 3:
        return np.full(times.shape, math.nan)
    return np.gradient(values, times, edge_order=2)


def _applicable_mass_equations(p: Parameters) -> dict[str, bool]:
    return {
        "u": p.lambda1 == 0,
        "v": classify_regime(p).tag is RegimeTag.DEGENERATE_EXCLUSION,
        "combined": not p.is_h1 and p.lambda1 == 0 and p.lambda2 == 0,
    }


def mass_equation(p: Parameters) -> str | None:
    """First applicable mass equation of v, combined, u; None if none."""
    applicable = _applicable_mass_equations(p)
    for candidate in ("v", "combined", "u"):
        if applicable[candidate]:
            return candidate
    return None


def mass_ode_residual(
    series: "TimeSeries",
    p: Parameters,
    s: SteadyState,
    equation: str | None = None,
) -> MassResidual:
    """Central-difference mass derivative minus the mass ODE right-hand side.

    Equations:
        ``u``: d/dt int u = -mu1 int u^2 + a1 int u v, when lambda1 = 0.
        ``v``: d/dt int v = -mu2 int v^2 - a2 int (u - u*) v, in the
            degenerate exclusion regime.
        ``combined``: d/dt (a2 int u + a1 int v)
            = -mu1 a2 int u^2 - mu2 a1 int v^2, when lambda1 = lambda2 = 0
            under (H2).

    When ``equation`` is None the first applicable of v, combined, u is used.

    Raises:
        ValidationError: If the equation does not apply to ``p``.
    """
    regime = classify_regime(p)
    applicable = _applicable_mass_equations(p)
    if equation is None:
        equation = mass_equation(p)
        if equation is None:
            raise ValidationError(
                f"No mass ODE applies in regime {regime.tag.value} "
                f"with lambda1 = {p.lambda1}"
            )
    if equation not in applicable:
        raise ValidationError(f"Unknown mass equation: {equation}")
    if not applicable[equation]:
        raise ValidationError(
            f"Mass equation '{equation}' does not apply in regime "
            f"{regime.tag.value}"
        )

    times = np.asarray(series.times, dtype=float)
    count = _uniform_prefix(times)
    times = times[:count]
    records = series.records[:count]
    cpl = series.couplings[:count]
    mass_u = _column(records, "mass_u")
    mass_v = _column(records, "mass_v")
    int_u2 = _column(cpl, "int_u2")
    int_v2 = _column(cpl, "int_v2")
    int_uv = _column(cpl, "int_uv")

    if equation == "u":
        quantity = mass_u
        rhs = -p.mu1 * int_u2 + p.a1 * int_uv
    elif equation == "v":
        quantity = mass_v
        rhs = -p.mu2 * int_v2 - p.a2 * (int_uv - s.u_star * mass_v)
    else:
        quantity = p.a2 * mass_u + p.a1 * mass_v
        rhs = -p.mu1 * p.a2 * int_u2 - p.mu2 * p.a1 * int_v2

    derivative = _time_derivative(quantity, times)
    return MassResidual(
        equation=equation,
        times=times,
        derivative=derivative,
        rhs=rhs,
        residual=derivative - rhs,
    )


def differential_inequality_residuals(
    series: "TimeSeries",
    p: Parameters,
    s: SteadyState,
    w: WeightSet,
    eta: float,
) -> InequalityLedger:
    """Signed slack of each monitored energy inequality per sample.

    A sample is applicable when it lies strictly inside the tube
    ``max|u - u*| + max|v - v*| < eta`` and its time derivative is finite.
    Weight groups the regime leaves unused are reported as not applicable.
    """
    if not eta > 0:
        raise ValidationError("eta must be > 0")
    regime = classify_regime(p)
    jac = jacobian_at_steady_state(p, s)
    u, v = s.u_star, s.v_star
    times = np.asarray(series.times, dtype=float)

    rec = series.records
    cpl = series.couplings
    eu0, ev0 = _column(rec, "e_u0"), _column(rec, "e_v0")
    eu1, ev1 = _column(rec, "e_u1"), _column(rec, "e_v1")
    eu2, ev2 = _column(rec, "e_u2"), _column(rec, "e_v2")
    y = _column(rec, "y")
    mass_v = _column(rec, "mass_v")
    eu3, ev3 = _column(cpl, "e_u3"), _column(cpl, "e_v3")
    x0, x1 = _column(cpl, "cross0"), _column(cpl, "cross1")
    x2, x3 = _column(cpl, "cross2"), _column(cpl, "cross3")
    in_tube = (_column(cpl, "linf_u") + _column(cpl, "linf_v")) < eta

    def d(values: np.ndarray) -> np.ndarray:
        return _time_derivative(values, times)

    damp_u = -jac.fu - eta * (p.a1 + p.mu1)
    damp_v = -jac.gv - eta * (p.a2 + p.mu2)
    slack: dict[str, np.ndarray] = {}

    slack["single_u"] = (
        0.5 * d(eu0)
        + 0.75 * p.D1 * eu1
        + damp_u * eu0
        - (p.a1 * u * x0 + p.chi1 * u * x1 + 0.5 * eta * p.chi1 * ev1)
    )
    slack["single_v"] = (
        0.5 * d(ev0)
        + 0.75 * p.D2 * ev1
        + damp_v * ev0
        - (-p.a2 * v * x0 - p.chi2 * v * x1 + 0.5 * eta * p.chi2 * eu1)
    )
    slack["l2_pair"] = (
        d(0.5 * w.A1 * eu0 + 0.5 * w.A2 * ev0)
        + 0.5 * w.A1 * p.D1 * eu1
        + 0.5 * w.A2 * p.D2 * ev1
        + w.A1 * damp_u * eu0
        + w.A2 * damp_v * ev0
        - (w.A1 * p.a1 * u - w.A2 * p.a2 * v) * x0
        - (w.A1 * p.chi1 * u - w.A2 * p.chi2 * v) * x1
    )
    slack["gradient_pair"] = (
        d(0.5 * w.B1 * eu1 + 0.5 * w.B2 * ev1)
        + 0.5 * w.B1 * p.D1 * eu2
        + 0.5 * w.B2 * p.D2 * ev2
        - (w.B1 * p.a1 * u - w.B2 * p.a2 * v) * x1
        - (w.B1 * p.chi1 * u - w.B2 * p.chi2 * v) * x2
    )
    slack["laplacian_pair"] = (
        d(0.5 * w.C1 * eu2 + 0.5 * w.C2 * ev2)
        + 0.5 * w.C1 * p.D1 * eu3
        + 0.5 * w.C2 * p.D2 * ev3
        - (w.C1 * p.a1 * u - w.C2 * p.a2 * v) * x2
        - (w.C1 * p.chi1 * u - w.C2 * p.chi2 * v) * x3
    )

    skipped = set()
    if {"B1", "B2"} <= w.unused:
        skipped.add("gradient_pair")

    if regime.tag in (RegimeTag.H1, RegimeTag.COEXISTENCE):
        slack["composite"] = (
            d(y)
            + 0.5 * w.C1 * p.D1 * eu3
            + 0.5 * w.C2 * p.D2 * ev3
            - 0.5 * w.A1 * jac.fu * eu0
            - 0.5 * w.A2 * jac.gv * ev0
        )
    if regime.tag is RegimeTag.DEGENERATE_EXCLUSION and w.X2 is not None:
        slack["mass_augmented"] = (
            d(0.5 * w.A1 * eu0 + 0.5 * w.A2 * ev0 + w.X2 * mass_v)
            + 0.5 * w.A1 * p.D1 * eu1
            + 0.5 * w.A2 * p.D2 * ev1
            + w.A1 * damp_u * eu0
            + (w.X2 * p.mu2 - w.A2 * eta * (p.a2 + p.mu2)) * ev0
            - (w.A1 * p.a1 * u - w.X2 * p.a2) * x0
            - w.A1 * p.chi1 * u * x1
        )

    applicable = {}
    for name, values in slack.items():
        mask = in_tube & np.isfinite(values)
        if name in skipped:
            mask = np.zeros_like(mask)
        applicable[name] = mask

    outside = int(np.count_nonzero(~in_tube))
    if outside:
        logger.warning(
            f"{outside} of {times.size} samples lie outside the eta-tube "
            f"(eta={eta:.3g})"
        )
    return InequalityLedger(
        times=times, slack=slack, applicable=applicable, eta=eta
    )


__all__ = [
    "WEIGHT_NAMES",
    "WeightSet",
    "FunctionalRecord",
    "CouplingRecord",
    "MassResidual",
    "InequalityLedger",
    "weights_for_regime",
    "cancellation_residuals",
    "phi_abc",
    "composite_value",
    "record",
    "couplings",
    "mass_equation",
    "mass_ode_residual",
    "differential_inequality_residuals",
]
