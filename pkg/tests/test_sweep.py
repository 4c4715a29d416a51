import math

import pytest

from crosstaxis import persistence
from crosstaxis.cli.sweep import SWEEP_FILE, run_sweep, sweep_key
from crosstaxis.errors import ValidationError


def test_sweep_key():
    assert sweep_key("lambda2") == "parameters.lambda2"
    assert sweep_key("perturbation.epsilon") == "perturbation.epsilon"


def test_empty_sweep_writes_header_only(small_config, tmp_path):
    rows = run_sweep(small_config(), "lambda2", [])
    assert rows == []
    table = persistence.load_table_csv(tmp_path / "run" / SWEEP_FILE)
    assert table == []


def test_unknown_axis_rejected(small_config):
    with pytest.raises(ValidationError):
        run_sweep(small_config(), "lambda3", [1.0])


def test_workers_must_be_positive(small_config):
    with pytest.raises(ValidationError):
        run_sweep(small_config(), "lambda2", [1.0], workers=0)


def test_sweep_crosses_the_threshold(small_config, tmp_path):
    rows = run_sweep(small_config(), "lambda2", [1.0, -1.0])
    ok, invalid = rows
    assert ok.regime == "CoexistenceH2"
    assert ok.exit_status == "ok"
    assert math.isnan(ok.exit_time)
    assert invalid.exit_status == "failed:setup"
    assert invalid.error
    assert (tmp_path / "run" / "lambda2_000" / "timeseries.csv").exists()
    table = persistence.load_table_csv(tmp_path / "run" / SWEEP_FILE)
    assert [row["exit_status"] for row in table] == ["ok", "failed:setup"]
