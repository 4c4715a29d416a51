import numpy as np
import pytest

from crosstaxis import persistence
from crosstaxis.analysis import RateModel
from crosstaxis.cli.fit import run_fit
from crosstaxis.model import RegimeTag

DIGEST = "00000000deadbeef"


def _decay_csv(tmp_path, distances):
    path = tmp_path / "decay.csv"
    times = np.linspace(0.0, 20.0, 81)
    rows = np.column_stack([times, distances(times)])
    persistence.write_numeric_csv(path, ["t", "d"], rows, DIGEST)
    return path


def test_fit_of_a_two_column_series(tmp_path):
    path = _decay_csv(tmp_path, lambda t: 0.1 / (1.0 + 0.4 * t))
    selection = run_fit(path, RegimeTag.DEGENERATE_EXCLUSION, 0.5)
    assert selection.winner is RateModel.ALGEBRAIC
    assert selection.matches_prediction
    report = tmp_path / "decay_fit.csv"
    assert persistence.read_config_hash(report) == DIGEST
    rows = persistence.load_table_csv(report, DIGEST)
    assert len(rows) == 2


def test_fit_report_goes_to_out_dir(tmp_path):
    path = _decay_csv(tmp_path, lambda t: np.exp(-0.5 * t))
    out = tmp_path / "reports"
    run_fit(path, RegimeTag.COEXISTENCE, out_dir=out)
    assert (out / "decay_fit.csv").exists()
    assert (out / "decay_fit_summary.txt").exists()


def test_missing_series(tmp_path):
    with pytest.raises(FileNotFoundError):
        run_fit(tmp_path / "absent.csv", RegimeTag.COEXISTENCE)
