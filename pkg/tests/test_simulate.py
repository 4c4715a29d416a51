import numpy as np
import pytest

from conftest import KINETICS
from crosstaxis import persistence
from crosstaxis.cli.simulate import run_simulate
from crosstaxis.config import config_hash, with_values
from crosstaxis.errors import StageError
from crosstaxis.model import RegimeTag


def test_run_writes_hashed_outputs(small_config):
    config = small_config()
    result = run_simulate(config)
    digest = config_hash(config)
    assert result.regime.tag is RegimeTag.COEXISTENCE
    assert result.config_hash == digest
    for role in ("config", "timeseries", "couplings", "checkpoint", "plot"):
        assert result.files[role].exists()
    assert persistence.read_config_hash(result.files["timeseries"]) == digest
    assert len(result.series) == 21
    assert result.series.times[-1] == pytest.approx(1.0)
    assert result.ledger is not None
    assert result.checks["exit_time_absent"]
    assert result.checks["clipping_free"]


def test_run_without_plot_scripts(small_config):
    result = run_simulate(small_config(outputs={"plot_scripts": False}))
    assert "plot" not in result.files


def test_h1_run_checks_mass(small_config):
    vanishing = dict.fromkeys(KINETICS, 0.0)
    config = small_config(parameters={**vanishing, "m1": 1.0, "m2": 1.0})
    result = run_simulate(config)
    assert result.regime.tag is RegimeTag.H1
    assert result.checks["mass_u_conserved"]
    assert result.checks["mass_v_conserved"]
    assert result.checks["y_nonincreasing"]


def test_h1_run_keeps_a_zero_mass_species_at_zero(small_config):
    vanishing = dict.fromkeys(KINETICS, 0.0)
    config = small_config(parameters={**vanishing, "m1": 1.0, "m2": 0.0})
    result = run_simulate(config)
    assert result.regime.trivial_v
    assert not result.regime.trivial_u
    assert result.checks["trivial_v_zero"]
    assert "trivial_u_zero" not in result.checks
    assert np.all(result.series.column("l1_v") == 0)


def test_off_cadence_end_still_records_the_mass_residual(small_config):
    config = small_config(
        parameters={"lambda2": 0.5},
        stepping={"t_end": 1.0, "sample_every": 0.3},
    )
    result = run_simulate(config)
    assert result.regime.tag is RegimeTag.DEGENERATE_EXCLUSION
    assert result.series.times[-1] == pytest.approx(1.0)
    assert result.mass_residual is not None
    np.testing.assert_allclose(
        result.mass_residual.times, [0.0, 0.3, 0.6, 0.9]
    )
    assert result.checks["mass_residual_recorded"]


def test_mass_residual_check_absent_without_a_mass_law(small_config):
    result = run_simulate(small_config())
    assert result.mass_residual is None
    assert "mass_residual_recorded" not in result.checks


def test_failed_stage_leaves_marker(small_config, tmp_path):
    config = small_config(stepping={"overflow_bound": 1.0})
    with pytest.raises(StageError) as info:
        run_simulate(config)
    assert info.value.stage == "simulate"
    marker = persistence.load_yaml(
        tmp_path / "run" / persistence.FAILURE_MARKER, config_hash(config)
    )
    assert marker["stage"] == "simulate"


def test_resume_continues_the_series(small_config, tmp_path):
    first = run_simulate(small_config())
    longer = small_config(
        stepping={"t_end": 1.5},
        outputs={"directory": str(tmp_path / "resumed")},
    )
    result = run_simulate(longer, resume=first.directory)
    times = result.series.times
    assert len(times) == 31
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(1.5)
    assert np.all(np.diff(times) > 0)
    assert np.array_equal(
        result.series.distances()[:21], first.series.distances()
    )


def test_resume_rejects_another_experiment(small_config, tmp_path):
    first = run_simulate(small_config())
    other = with_values(
        small_config(stepping={"t_end": 1.5}),
        {
            "parameters.chi1": 2.0,
            "outputs.directory": str(tmp_path / "other"),
        },
    )
    with pytest.raises(StageError) as info:
        run_simulate(other, resume=first.directory)
    assert info.value.stage == "perturb"


def test_resume_needs_a_later_end(small_config, tmp_path):
    first = run_simulate(small_config())
    again = small_config(outputs={"directory": str(tmp_path / "again")})
    with pytest.raises(StageError):
        run_simulate(again, resume=first.directory)
