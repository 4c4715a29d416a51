import dataclasses
import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from crosstaxis.errors import ValidationError
from crosstaxis.functionals import (
    WEIGHT_NAMES,
    WeightSet,
    cancellation_residuals,
    composite_value,
    couplings,
    differential_inequality_residuals,
    mass_equation,
    mass_ode_residual,
    phi_abc,
    record,
    weights_for_regime,
)
from crosstaxis.grid import Field, Grid
from crosstaxis.inequalities import cosine_mode
from crosstaxis.model import (
    Parameters,
    RegimeTag,
    SteadyState,
    classify_regime,
    steady_state,
)
from crosstaxis.solver import SimState, StepControl, TimeSeries, simulate

POINCARE = 1.0 / math.pi**2


def _weights(p, poincare=None):
    s = steady_state(p, 1.0)
    return weights_for_regime(p, s, classify_regime(p), poincare), s


def test_coexistence_weights(coexistence):
    w, _ = _weights(coexistence)
    assert_allclose(
        (w.A1, w.A2, w.B1, w.B2, w.C1, w.C2),
        (1 / 6, 4 / 3, 1 / 2, 8 / 3, 1 / 3, 4 / 3),
        rtol=1e-14,
    )
    assert w.X2 is None
    assert not w.unused


def test_h1_weights(h1):
    w, _ = _weights(h1)
    assert_allclose([w.as_dict()[k] for k in WEIGHT_NAMES], 1.0)


def test_h1_trivial_component_marks_weights_unused():
    p = Parameters(D1=1.0, D2=1.0, chi1=1.0, chi2=1.0, m1=1.0, m2=0.0)
    w, _ = _weights(p)
    # chi2 * v_star weights u, so they vanish with v
    assert w.unused == {"A1", "B1", "C1"}


@pytest.mark.parametrize("name", ["coexistence", "h1"])
def test_cancellation_identities(name, request):
    p = request.getfixturevalue(name)
    w, s = _weights(p)
    assert_allclose(cancellation_residuals(w, p, s), 0.0, atol=1e-14)


def test_perturbed_weight_breaks_first_cancellation(coexistence):
    w, s = _weights(coexistence)
    delta = 1e-3
    perturbed = dataclasses.replace(w, A1=w.A1 + delta)
    first = cancellation_residuals(perturbed, coexistence, s)[0]
    assert first == pytest.approx(delta * coexistence.a1 * s.u_star)


def test_degenerate_weights(degenerate):
    w, s = _weights(degenerate, POINCARE)
    assert w.X2 == pytest.approx(2.0)
    assert w.B1 == w.B2 == 0.0
    assert w.unused == {"B1", "B2"}
    assert w.A2 == pytest.approx(1.0)
    expected_c2 = 16.0 * max(POINCARE**2, 1.0) * (s.u_star + 1.0) ** 2
    assert w.C2 == pytest.approx(expected_c2)


def test_strict_exclusion_weights(strict_exclusion):
    w, _ = _weights(strict_exclusion, POINCARE)
    rate = 0.5 * min(1.0, 0.3)
    assert w.A2 == pytest.approx(max(1.0 / rate**2, 1.0))
    assert w.X2 is None


def test_exclusion_weights_need_poincare(strict_exclusion):
    with pytest.raises(ValidationError):
        _weights(strict_exclusion)


def test_exclusion_rejects_positive_v_star(degenerate):
    with pytest.raises(ValidationError):
        weights_for_regime(
            degenerate,
            SteadyState(1.0, 0.1),
            classify_regime(degenerate),
            POINCARE,
        )


def test_negative_weight_rejected():
    with pytest.raises(ValidationError):
        WeightSet(A1=-1.0, A2=1.0, B1=1.0, B2=1.0, C1=1.0, C2=1.0)


def test_record_at_steady_state_is_zero(coexistence, line):
    w, s = _weights(coexistence)
    state = SimState(
        Field.constant(line, s.u_star), Field.constant(line, s.v_star)
    )
    rec = record(state, s, w)
    for name in ("e_u0", "e_v1", "e_u2", "y", "w22_u", "w22_v"):
        assert getattr(rec, name) == pytest.approx(0.0, abs=1e-24)
    assert rec.mass_u == pytest.approx(4 / 3)
    cpl = couplings(state, s)
    assert cpl.linf_u == pytest.approx(0.0, abs=1e-15)
    assert cpl.l1_v == pytest.approx(1 / 3)


def test_composite_matches_phi(coexistence, line):
    w, s = _weights(coexistence)
    du = Field(line, 0.01 * cosine_mode(line, (1,)))
    dv = Field(line, -0.02 * cosine_mode(line, (2,)))
    state = SimState(du + s.u_star, dv + s.v_star)
    rec = record(state, s, w)
    expected = phi_abc(du, w.A1, w.B1, w.C1) + phi_abc(dv, w.A2, w.B2, w.C2)
    assert rec.y == pytest.approx(expected, rel=1e-8)
    assert composite_value(
        w, rec.e_u0, rec.e_u1, rec.e_u2, rec.e_v0, rec.e_v1, rec.e_v2
    ) == pytest.approx(rec.y)


def test_phi_abc_of_l2_part():
    grid = Grid((16,), (1.0,))
    f = Field(grid, cosine_mode(grid, (1,)))
    assert phi_abc(f, 2.0, 0.0, 0.0) == pytest.approx(0.5)


def _short_series(p, grid, t_end=0.5, sampling=0.05):
    w, s = _weights(p, POINCARE)
    u = s.u_star + 0.01 * cosine_mode(grid, (1,))
    v = np.full(grid.shape, s.v_star + 0.005)
    initial = SimState.from_arrays(grid, u, v)
    series = simulate(
        initial, p, StepControl(dt=0.01), t_end, sampling, 0.1, w, steady=s
    )
    return series, w, s


def test_ledger_ids_follow_regime(coexistence, degenerate, line):
    series, w, s = _short_series(coexistence, line)
    ledger = differential_inequality_residuals(
        series, coexistence, s, w, 0.1
    )
    assert "composite" in ledger.ids
    assert "mass_augmented" not in ledger.ids
    assert ledger.applicable["composite"].shape == series.times.shape

    series, w, s = _short_series(degenerate, line)
    ledger = differential_inequality_residuals(
        series, degenerate, s, w, 0.1
    )
    assert "mass_augmented" in ledger.ids
    assert not ledger.applicable["gradient_pair"].any()
    assert math.isnan(ledger.max_slack("gradient_pair"))


def test_ledger_rejects_non_positive_eta(coexistence, line):
    series, w, s = _short_series(coexistence, line)
    with pytest.raises(ValidationError):
        differential_inequality_residuals(series, coexistence, s, w, 0.0)


def test_samples_outside_the_tube_are_masked_and_logged(
    coexistence, line, caplog
):
    series, w, s = _short_series(coexistence, line)
    with caplog.at_level(logging.WARNING, logger="crosstaxis"):
        ledger = differential_inequality_residuals(
            series, coexistence, s, w, 1e-6
        )
    assert not ledger.applicable["composite"].any()
    assert f"{len(series)} of {len(series)} samples lie outside" in (
        caplog.text
    )


def test_mass_residual_in_degenerate_regime(degenerate, line):
    series, _, s = _short_series(degenerate, line, t_end=1.0)
    residual = mass_ode_residual(series, degenerate, s)
    assert residual.equation == "v"
    scale = np.max(np.abs(residual.rhs))
    # central differences at a 0.05 sampling
    assert residual.norm() <= 5e-2 * scale


def test_mass_residual_not_applicable(coexistence, line):
    series, _, s = _short_series(coexistence, line)
    with pytest.raises(ValidationError):
        mass_ode_residual(series, coexistence, s)
    with pytest.raises(ValidationError):
        mass_ode_residual(series, coexistence, s, equation="v")


def test_mass_residual_needs_three_samples(degenerate, line):
    series, _, s = _short_series(degenerate, line)
    short = TimeSeries(series.records[:2], series.couplings[:2])
    with pytest.raises(ValidationError):
        mass_ode_residual(short, degenerate, s)


def test_mass_residual_drops_an_off_cadence_final_sample(
    degenerate, line, caplog
):
    series, _, s = _short_series(degenerate, line, t_end=1.0, sampling=0.3)
    assert_allclose(series.times, [0.0, 0.3, 0.6, 0.9, 1.0])
    with caplog.at_level(logging.WARNING, logger="crosstaxis"):
        residual = mass_ode_residual(series, degenerate, s)
    assert_allclose(residual.times, [0.0, 0.3, 0.6, 0.9])
    assert residual.residual.shape == (4,)
    assert "Dropping the final sample" in caplog.text


@pytest.mark.parametrize(
    "name, expected",
    [
        ("coexistence", None),
        ("strict_exclusion", None),
        ("degenerate", "v"),
        ("h1", "u"),
    ],
)
def test_mass_equation_per_regime(name, expected, request):
    assert mass_equation(request.getfixturevalue(name)) == expected


def test_mass_equation_without_predator_growth(coexistence):
    p = dataclasses.replace(coexistence, lambda1=0.0)
    assert classify_regime(p).tag is RegimeTag.COEXISTENCE
    assert mass_equation(p) == "u"
