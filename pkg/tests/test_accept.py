import numpy as np
import pytest

from conftest import make_parameters
from crosstaxis import persistence
from crosstaxis.cli.accept import AcceptanceSettings, run_acceptance
from crosstaxis.cli.accept.criteria import (
    BUDGETS,
    CRITERIA,
    damped_newton,
    oracle_steady_state,
)
from crosstaxis.cli.accept.main import (
    ACCEPTANCE_FILE,
    run_criterion,
    settings_hash,
)
from crosstaxis.model import steady_state

FAST = ["steady_state_oracle", "cancellation_identities"]


def test_every_criterion_has_a_budget():
    assert set(CRITERIA) == set(BUDGETS)


def test_damped_newton_finds_the_coexistence_state():
    p = make_parameters()
    s = steady_state(p, 1.0)
    u, v = damped_newton(p, (1.2, 0.4))
    assert u == pytest.approx(s.u_star, rel=1e-12)
    assert v == pytest.approx(s.v_star, rel=1e-12)


@pytest.mark.parametrize(
    "name", ["coexistence", "strict_exclusion", "degenerate"]
)
def test_oracle_agrees_with_the_closed_form(name, request):
    p = request.getfixturevalue(name)
    s = steady_state(p, 1.0)
    root = oracle_steady_state(p, np.random.default_rng(0))
    assert root is not None
    assert root[0] == pytest.approx(s.u_star, abs=1e-10)
    assert root[1] == pytest.approx(s.v_star, abs=1e-10)


def test_newton_from_the_prey_axis_stays_on_it(strict_exclusion):
    u, v = damped_newton(strict_exclusion, (0.7, 0.0))
    assert v == 0.0
    assert u == pytest.approx(1.0, rel=1e-12)


def test_quick_fast_criteria_pass(tmp_path):
    settings = AcceptanceSettings(tmp_path, quick=True)
    results = run_acceptance(settings, FAST)
    assert [r.name for r in results] == FAST
    assert all(r.passed for r in results), [r.detail for r in results]
    rows = persistence.load_table_csv(
        tmp_path / ACCEPTANCE_FILE, settings_hash(settings)
    )
    assert [row["passed"] for row in rows] == ["True", "True"]


def test_unknown_criterion_rejected(tmp_path):
    with pytest.raises(ValueError):
        run_acceptance(AcceptanceSettings(tmp_path), ["nonexistent"])


def test_settings_hash_depends_on_seed_and_mode(tmp_path):
    base = settings_hash(AcceptanceSettings(tmp_path))
    assert settings_hash(AcceptanceSettings(tmp_path / "x")) == base
    assert settings_hash(AcceptanceSettings(tmp_path, seed=1)) != base
    assert settings_hash(AcceptanceSettings(tmp_path, quick=True)) != base


@pytest.mark.slow
@pytest.mark.parametrize(
    "name", [name for name in CRITERIA if name not in FAST]
)
def test_quick_criterion(name, tmp_path):
    result = run_criterion(name, AcceptanceSettings(tmp_path, quick=True))
    assert result.passed, result.detail
