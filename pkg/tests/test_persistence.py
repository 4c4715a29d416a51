import numpy as np
import pytest

from crosstaxis import persistence
from crosstaxis.errors import ValidationError
from crosstaxis.grid import Grid
from crosstaxis.solver import SimState

DIGEST = "0123456789abcdef"


def test_numeric_csv_carries_the_hash(tmp_path):
    path = tmp_path / "series.csv"
    rows = np.array([[0.0, 1.0], [0.5, 1.0 / 3.0]])
    persistence.write_numeric_csv(path, ["t", "d"], rows, DIGEST)
    assert path.read_text().splitlines()[0] == f"# config_hash: {DIGEST}"
    assert persistence.read_config_hash(path) == DIGEST
    columns, data = persistence.load_numeric_csv(path, DIGEST)
    assert columns == ["t", "d"]
    # 17 significant digits reproduce every double
    assert data[1, 1] == 1.0 / 3.0


def test_hash_mismatch_rejected(tmp_path):
    path = tmp_path / "series.csv"
    persistence.write_numeric_csv(path, ["t"], np.zeros((1, 1)), DIGEST)
    with pytest.raises(ValidationError):
        persistence.load_numeric_csv(path, "ffffffffffffffff")


def test_file_without_hash_rejected(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("t,d\n0,1\n")
    with pytest.raises(ValidationError):
        persistence.read_config_hash(path)


def test_decay_series_from_two_columns(tmp_path):
    path = tmp_path / "decay.csv"
    t = np.linspace(0.0, 1.0, 11)
    rows = np.column_stack([t, np.exp(-t)])
    persistence.write_numeric_csv(path, ["t", "d"], rows, DIGEST)
    times, distances = persistence.load_decay_series(path)
    assert np.array_equal(times, t)
    assert np.array_equal(distances, np.exp(-t))


def test_decay_series_needs_a_distance(tmp_path):
    path = tmp_path / "other.csv"
    persistence.write_numeric_csv(path, ["t", "x"], np.ones((2, 2)), DIGEST)
    with pytest.raises(ValidationError):
        persistence.load_decay_series(path)


def test_checkpoint_restores_state(tmp_path):
    grid = Grid((4, 3), (1.0, 2.0))
    rng = np.random.default_rng(0)
    state = SimState.from_arrays(
        grid, rng.random(grid.shape), rng.random(grid.shape), 2.5
    )
    persistence.write_checkpoint(
        tmp_path, state, {"scheme": "imex_euler"}, DIGEST, exit_time=1.0
    )
    checkpoint = persistence.load_checkpoint(tmp_path, DIGEST)
    assert checkpoint.state.t == 2.5
    assert checkpoint.exit_time == 1.0
    assert checkpoint.metadata["scheme"] == "imex_euler"
    assert np.array_equal(checkpoint.state.u.values, state.u.values)
    assert np.array_equal(checkpoint.state.v.values, state.v.values)


def test_failure_marker(tmp_path):
    path = persistence.write_failure_marker(
        tmp_path, "simulate", "blow-up", DIGEST
    )
    marker = persistence.load_yaml(path, DIGEST)
    assert marker["stage"] == "simulate"
    assert marker["message"] == "blow-up"


def test_table_csv_formats_floats(tmp_path):
    path = tmp_path / "table.csv"
    persistence.write_table_csv(
        path, ["name", "value", "flag"], [["a", 0.1, True]], DIGEST
    )
    rows = persistence.load_table_csv(path, DIGEST)
    assert rows == [
        {"name": "a", "value": "0.10000000000000001", "flag": "True"}
    ]
