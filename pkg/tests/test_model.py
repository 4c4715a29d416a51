import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import make_parameters
from crosstaxis.errors import ValidationError
from crosstaxis.model import (
    Parameters,
    RegimeTag,
    SteadyState,
    classify_regime,
    default_eta,
    jacobian_at_steady_state,
    reaction,
    steady_state,
)

positive = st.floats(min_value=0.1, max_value=10.0)


def test_classify_coexistence(coexistence):
    regime = classify_regime(coexistence)
    assert regime.tag is RegimeTag.COEXISTENCE
    assert regime.discriminant == pytest.approx(0.5)
    assert not regime.is_exclusion


def test_classify_degenerate(degenerate):
    regime = classify_regime(degenerate)
    assert regime.tag is RegimeTag.DEGENERATE_EXCLUSION
    assert regime.discriminant == 0.0
    assert regime.predicts_algebraic_decay


def test_classify_strict_exclusion(strict_exclusion):
    regime = classify_regime(strict_exclusion)
    assert regime.tag is RegimeTag.STRICT_EXCLUSION
    assert regime.discriminant == pytest.approx(-0.3)


def test_classify_rounding_counts_as_degenerate():
    p = make_parameters(lambda2=0.5 * (1.0 + 1e-14))
    assert classify_regime(p).tag is RegimeTag.DEGENERATE_EXCLUSION


def test_classify_h1_trivial_components():
    p = Parameters(D1=1.0, D2=1.0, chi1=1.0, chi2=1.0, m1=0.0, m2=3.0)
    regime = classify_regime(p)
    assert regime.tag is RegimeTag.H1
    assert regime.trivial_u
    assert not regime.trivial_v


def test_steady_states(coexistence, degenerate, strict_exclusion):
    s = steady_state(coexistence, 1.0)
    assert_allclose((s.u_star, s.v_star), (4 / 3, 1 / 3), rtol=1e-14)
    s = steady_state(degenerate, 1.0)
    assert (s.u_star, s.v_star) == (1.0, 0.0)
    s = steady_state(strict_exclusion, 2.0)
    assert (s.u_star, s.v_star) == (1.0, 0.0)


def test_steady_state_h1_divides_mass_by_volume():
    p = Parameters(D1=1.0, D2=1.0, chi1=1.0, chi2=1.0, m1=2.0, m2=3.0)
    s = steady_state(p, 1.0)
    assert (s.u_star, s.v_star) == (2.0, 3.0)
    s = steady_state(p, 4.0)
    assert (s.u_star, s.v_star) == (0.5, 0.75)


def test_steady_state_rejects_empty_domain(coexistence):
    with pytest.raises(ValidationError):
        steady_state(coexistence, 0.0)


def test_reaction(coexistence):
    assert reaction(coexistence, 1.0, 1.0) == (1.0, -0.5)


def test_jacobian_coexistence(coexistence):
    jac = jacobian_at_steady_state(coexistence, SteadyState(4 / 3, 1 / 3))
    assert_allclose(
        jac.as_matrix(), [[-4 / 3, 4 / 3], [-1 / 6, -1 / 3]], rtol=1e-14
    )
    assert jac.strict_signs


def test_jacobian_exclusion(degenerate, strict_exclusion):
    jac = jacobian_at_steady_state(degenerate, SteadyState(1.0, 0.0))
    assert jac.gv == 0.0
    assert jac.weak_signs and not jac.strict_signs
    jac = jacobian_at_steady_state(strict_exclusion, SteadyState(1.0, 0.0))
    assert jac.gv == pytest.approx(-0.3)
    assert jac.fu == -1.0


def test_jacobian_rejects_non_steady_point(coexistence):
    with pytest.raises(ValidationError):
        jacobian_at_steady_state(coexistence, SteadyState(1.0, 1.0))


@pytest.mark.parametrize(
    "overrides",
    [
        {"chi1": 0.0},
        {"D2": -1.0},
        {"mu1": 0.0},
        {"a2": 0.0},
        {"lambda1": -0.1},
        {"chi2": math.inf},
        {"D1": True},
    ],
)
def test_parameters_rejected(overrides):
    with pytest.raises(ValidationError):
        make_parameters(**overrides)


def test_default_eta():
    assert default_eta(SteadyState(0.0, 0.0)) == 0.1
    assert default_eta(SteadyState(4 / 3, 1 / 3)) == pytest.approx(0.1)
    assert default_eta(SteadyState(0.2, 0.1)) == pytest.approx(0.03)


@given(positive, positive, positive, positive, positive, positive)
def test_steady_state_annihilates_kinetics(l1, l2, m1, m2, a1, a2):
    p = make_parameters(lambda1=l1, lambda2=l2, mu1=m1, mu2=m2, a1=a1, a2=a2)
    s = steady_state(p, 1.0)
    jac = jacobian_at_steady_state(p, s)
    assert jac.weak_signs
    regime = classify_regime(p)
    if regime.tag is RegimeTag.COEXISTENCE:
        assert s.v_star > 0
    else:
        assert s.v_star == 0.0
