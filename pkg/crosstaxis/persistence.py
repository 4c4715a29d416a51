"""CSV, checkpoint and plot-script files of an experiment directory.

Every file starts with (CSV) or contains (YAML) the config hash of the run
that wrote it; loaders given an expected hash refuse files from other runs.
Floats are written with 17 significant digits so they read back exactly.
"""

import csv
import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from crosstaxis.analysis import RateFit, RateSelection
from crosstaxis.errors import ValidationError
from crosstaxis.functionals import (
    CouplingRecord,
    FunctionalRecord,
    InequalityLedger,
    MassResidual,
)
from crosstaxis.grid import Grid
from crosstaxis.inequalities import RatioReport, TestFieldSpec
from crosstaxis.solver.state import SimState, TimeSeries

logger = logging.getLogger("crosstaxis")

HASH_PREFIX = "# config_hash: "
FLOAT_FORMAT = "%.17g"

TIMESERIES_FILE = "timeseries.csv"
COUPLINGS_FILE = "couplings.csv"
SNAPSHOTS_FILE = "snapshots.csv"
LEDGER_FILE = "inequality_ledger.csv"
MASS_FILE = "mass_residual.csv"
FIT_FILE = "fit.csv"
FIT_SUMMARY_FILE = "fit_summary.txt"
CHECKPOINT_FIELDS_FILE = "checkpoint.csv"
CHECKPOINT_META_FILE = "checkpoint.yaml"
CONFIG_ECHO_FILE = "config.yaml"
FAILURE_MARKER = "FAILED"

FUNCTIONAL_COLUMNS = tuple(f.name for f in fields(FunctionalRecord))
COUPLING_COLUMNS = tuple(f.name for f in fields(CouplingRecord))


def _format(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def read_config_hash(path: str | Path) -> str:
    with open(path) as f:
        first = f.readline().rstrip("\n")
    if not first.startswith(HASH_PREFIX):
        raise ValidationError(f"{path} does not carry a config hash")
    return first[len(HASH_PREFIX):]


def _check_hash(path: str | Path, expected: str | None) -> str:
    found = read_config_hash(path)
    if expected is not None and found != expected:
        raise ValidationError(
            f"{path} was written by config {found}, expected {expected}"
        )
    return found


def write_numeric_csv(
    path: str | Path,
    columns: tuple[str, ...] | list[str],
    rows: np.ndarray,
    config_hash: str,
) -> Path:
    path = Path(path)
    data = np.asarray(rows, dtype=float).reshape(-1, len(columns))
    with open(path, "w", newline="") as f:
        f.write(f"{HASH_PREFIX}{config_hash}\n")
        np.savetxt(
            f,
            data,
            fmt=FLOAT_FORMAT,
            delimiter=",",
            header=",".join(columns),
            comments="",
        )
    logger.debug(f"Wrote {path}")
    return path


def load_numeric_csv(
    path: str | Path, expected_hash: str | None = None
) -> tuple[list[str], np.ndarray]:
    _check_hash(path, expected_hash)
    with open(path) as f:
        f.readline()
        columns = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    return columns, data.reshape(-1, len(columns))


def write_table_csv(
    path: str | Path,
    columns: list[str],
    rows: list[list[Any]],
    config_hash: str,
) -> Path:
    """Mixed text and number table."""
    path = Path(path)
    with open(path, "w", newline="") as f:
        f.write(f"{HASH_PREFIX}{config_hash}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(value) for value in row])
    logger.debug(f"Wrote {path}")
    return path


def load_table_csv(
    path: str | Path, expected_hash: str | None = None
) -> list[dict[str, str]]:
    _check_hash(path, expected_hash)
    with open(path, newline="") as f:
        f.readline()
        return list(csv.DictReader(f))


def write_yaml(path: str | Path, data: dict, config_hash: str) -> Path:
    path = Path(path)
    payload = {"config_hash": config_hash, **data}
    with open(path, "w") as f:
        f.write(f"{HASH_PREFIX}{config_hash}\n")
        yaml.safe_dump(payload, f, sort_keys=True)
    return path


def load_yaml(path: str | Path, expected_hash: str | None = None) -> dict:
    _check_hash(path, expected_hash)
    with open(path) as f:
        return yaml.safe_load(f)


# ---------------------------------------------------------------------------
# Time series
# ---------------------------------------------------------------------------


def write_timeseries(
    directory: str | Path, series: TimeSeries, config_hash: str
) -> tuple[Path, Path]:
    directory = Path(directory)
    functional = [
        [getattr(r, name) for name in FUNCTIONAL_COLUMNS]
        for r in series.records
    ]
    coupling = [
        [getattr(c, name) for name in COUPLING_COLUMNS]
        for c in series.couplings
    ]
    return (
        write_numeric_csv(
            directory / TIMESERIES_FILE,
            FUNCTIONAL_COLUMNS,
            np.array(functional),
            config_hash,
        ),
        write_numeric_csv(
            directory / COUPLINGS_FILE,
            COUPLING_COLUMNS,
            np.array(coupling),
            config_hash,
        ),
    )


def load_timeseries(
    directory: str | Path, expected_hash: str | None = None
) -> TimeSeries:
    """Records and couplings of a run; snapshots are not restored."""
    directory = Path(directory)
    columns, data = load_numeric_csv(
        directory / TIMESERIES_FILE, expected_hash
    )
    if tuple(columns) != FUNCTIONAL_COLUMNS:
        raise ValidationError(f"Unexpected time-series columns: {columns}")
    records = [FunctionalRecord(*map(float, row)) for row in data]

    couplings = []
    coupling_path = directory / COUPLINGS_FILE
    if coupling_path.exists():
        columns, data = load_numeric_csv(coupling_path, expected_hash)
        if tuple(columns) != COUPLING_COLUMNS:
            raise ValidationError(f"Unexpected coupling columns: {columns}")
        couplings = [CouplingRecord(*map(float, row)) for row in data]
    else:
        couplings = [
            CouplingRecord(r.t, *([np.nan] * (len(COUPLING_COLUMNS) - 1)))
            for r in records
        ]
    return TimeSeries(records=tuple(records), couplings=tuple(couplings))


def load_decay_series(
    path: str | Path, expected_hash: str | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """(t, w22_u + w22_v) from a time-series CSV, or (t, d) from a two
    column CSV with columns ``t`` and ``d``."""
    columns, data = load_numeric_csv(path, expected_hash)
    if "w22_u" in columns and "w22_v" in columns:
        d = data[:, columns.index("w22_u")] + data[:, columns.index("w22_v")]
    elif "d" in columns:
        d = data[:, columns.index("d")]
    else:
        raise ValidationError(
            f"{path} has neither w22_u/w22_v nor a d column"
        )
    if "t" not in columns:
        raise ValidationError(f"{path} has no t column")
    return data[:, columns.index("t")], d


def _field_columns(grid: Grid) -> list[str]:
    return [f"x{axis}" for axis in range(grid.dim)] + ["u", "v"]


def _field_rows(state: SimState) -> np.ndarray:
    coordinates = [x.ravel(order="F") for x in state.grid.mesh()]
    return np.column_stack(
        coordinates + [state.u.flatten(), state.v.flatten()]
    )


def write_snapshots(
    directory: str | Path, snapshots: tuple[SimState, ...], config_hash: str
) -> Path | None:
    if not snapshots:
        return None
    grid = snapshots[0].grid
    rows = [
        np.column_stack([np.full(grid.size, s.t), _field_rows(s)])
        for s in snapshots
    ]
    return write_numeric_csv(
        Path(directory) / SNAPSHOTS_FILE,
        ["t"] + _field_columns(grid),
        np.vstack(rows),
        config_hash,
    )


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Checkpoint:
    state: SimState
    time_origin: float
    clipped_mass: float
    exit_time: float | None
    metadata: dict


def write_checkpoint(
    directory: str | Path,
    state: SimState,
    metadata: dict,
    config_hash: str,
    time_origin: float = 0.0,
    clipped_mass: float = 0.0,
    exit_time: float | None = None,
) -> Path:
    """Full-field snapshot CSV plus a YAML record sufficient for restart."""
    directory = Path(directory)
    write_numeric_csv(
        directory / CHECKPOINT_FIELDS_FILE,
        _field_columns(state.grid),
        _field_rows(state),
        config_hash,
    )
    return write_yaml(
        directory / CHECKPOINT_META_FILE,
        {
            "t": FLOAT_FORMAT % state.t,
            "time_origin": FLOAT_FORMAT % time_origin,
            "clipped_mass": FLOAT_FORMAT % clipped_mass,
            "exit_time": (
                None if exit_time is None else FLOAT_FORMAT % exit_time
            ),
            "points": list(state.grid.points_per_axis),
            "lengths": list(state.grid.lengths),
            **metadata,
        },
        config_hash,
    )


def load_checkpoint(
    directory: str | Path, expected_hash: str | None = None
) -> Checkpoint:
    directory = Path(directory)
    meta = load_yaml(directory / CHECKPOINT_META_FILE, expected_hash)
    grid = Grid(tuple(meta["points"]), tuple(meta["lengths"]))
    columns, data = load_numeric_csv(
        directory / CHECKPOINT_FIELDS_FILE, expected_hash
    )
    if columns != _field_columns(grid):
        raise ValidationError(f"Unexpected checkpoint columns: {columns}")
    u = data[:, columns.index("u")]
    v = data[:, columns.index("v")]
    exit_time = meta.get("exit_time")
    return Checkpoint(
        state=SimState.from_arrays(
            grid,
            np.reshape(u, grid.shape, order="F"),
            np.reshape(v, grid.shape, order="F"),
            float(meta["t"]),
        ),
        time_origin=float(meta["time_origin"]),
        clipped_mass=float(meta["clipped_mass"]),
        exit_time=None if exit_time is None else float(exit_time),
        metadata=meta,
    )


# ---------------------------------------------------------------------------
# Diagnostics and reports
# ---------------------------------------------------------------------------


def write_ledger(
    directory: str | Path, ledger: InequalityLedger, config_hash: str
) -> Path:
    columns = ["t"]
    data = [ledger.times]
    for name in ledger.ids:
        columns += [f"{name}_slack", f"{name}_applicable"]
        data += [ledger.slack[name], ledger.applicable[name].astype(float)]
    return write_numeric_csv(
        Path(directory) / LEDGER_FILE,
        columns,
        np.column_stack(data),
        config_hash,
    )


def write_mass_residual(
    directory: str | Path, residual: MassResidual, config_hash: str
) -> Path:
    return write_numeric_csv(
        Path(directory) / MASS_FILE,
        ["t", "derivative", "rhs", "residual"],
        np.column_stack(
            [
                residual.times,
                residual.derivative,
                residual.rhs,
                residual.residual,
            ]
        ),
        config_hash,
    )


def _fit_row(fit: RateFit, selection: RateSelection | None) -> list[Any]:
    row: list[Any] = [
        fit.model.value,
        fit.K1,
        fit.K2,
        fit.residual,
        fit.window[0],
        fit.window[1],
        fit.samples,
    ]
    if selection is not None:
        row.append(fit.model is selection.winner)
    return row


FIT_COLUMNS = [
    "model",
    "K1",
    "K2",
    "residual",
    "window_start",
    "window_end",
    "samples",
]


def write_fit_report(
    directory: str | Path,
    selection: RateSelection,
    config_hash: str,
    prefix: str = "",
) -> Path:
    """Both fits as CSV rows plus the human-readable summary block."""
    directory = Path(directory)
    rows = [
        _fit_row(selection.exponential, selection),
        _fit_row(selection.algebraic, selection),
    ]
    path = write_table_csv(
        directory / f"{prefix}{FIT_FILE}",
        FIT_COLUMNS + ["winner"],
        rows,
        config_hash,
    )
    with open(directory / f"{prefix}{FIT_SUMMARY_FILE}", "w") as f:
        f.write(f"{HASH_PREFIX}{config_hash}\n")
        f.write(selection.summary() + "\n")
    return path


def write_ratio_reports(
    directory: str | Path,
    reports: dict[str, RatioReport],
    spec: TestFieldSpec,
    config_hash: str,
) -> list[Path]:
    """One CSV per inequality: a row per test field and a summary row."""
    directory = Path(directory)
    paths = []
    for name, report in reports.items():
        rows: list[list[Any]] = [
            [label, float(ratio), "", "", "", "", "", "", ""]
            for label, ratio in zip(report.labels, report.ratios)
        ]
        rows.append(
            [
                "summary",
                report.max_ratio,
                report.refined_max_ratio,
                report.argmax_label,
                "x".join(map(str, report.points)),
                spec.seed,
                spec.max_mode,
                spec.decay,
                spec.count,
            ]
        )
        paths.append(
            write_table_csv(
                directory / f"ratios_{name}.csv",
                [
                    "label",
                    "ratio",
                    "refined_max_ratio",
                    "argmax_label",
                    "points",
                    "seed",
                    "max_mode",
                    "decay",
                    "count",
                ],
                rows,
                config_hash,
            )
        )
    return paths


def write_failure_marker(
    directory: str | Path, stage: str, message: str, config_hash: str
) -> Path:
    return write_yaml(
        Path(directory) / FAILURE_MARKER,
        {"stage": stage, "message": message},
        config_hash,
    )


def write_config_echo(
    directory: str | Path, config_text: str, config_hash: str
) -> Path:
    path = Path(directory) / CONFIG_ECHO_FILE
    with open(path, "w") as f:
        f.write(f"{HASH_PREFIX}{config_hash}\n")
        f.write(config_text)
    return path


# ---------------------------------------------------------------------------
# Plot scripts
# ---------------------------------------------------------------------------

_TIMESERIES_SCRIPT = '''"""Plot the decay of one run. Requires matplotlib."""

import matplotlib.pyplot as plt
import numpy as np

data = np.genfromtxt(
    "{timeseries}", delimiter=",", names=True, skip_header=1
)
d = data["w22_u"] + data["w22_v"]

fig, (top, bottom) = plt.subplots(2, 1, sharex=True)
top.semilogy(data["t"], d)
top.set_ylabel("w22 distance")
bottom.semilogy(data["t"], np.maximum(data["y"], 1e-300))
bottom.set_ylabel("y")
bottom.set_xlabel("t")
fig.savefig("timeseries.png", dpi=150)
'''

_RATIOS_SCRIPT = '''"""Plot sampled inequality ratios. Requires matplotlib."""

import csv
import glob

import matplotlib.pyplot as plt

fig, ax = plt.subplots()
for path in sorted(glob.glob("ratios_*.csv")):
    with open(path, newline="") as f:
        f.readline()
        rows = [r for r in csv.DictReader(f) if r["label"] != "summary"]
    ax.semilogy([float(r["ratio"]) for r in rows], ".", label=path[7:-4])
ax.set_xlabel("test field")
ax.set_ylabel("ratio")
ax.legend()
fig.savefig("ratios.png", dpi=150)
'''


def write_plot_script(
    directory: str | Path, kind: str, config_hash: str
) -> Path:
    """Standalone matplotlib script; the harness never runs it."""
    scripts = {
        "timeseries": _TIMESERIES_SCRIPT.format(timeseries=TIMESERIES_FILE),
        "ratios": _RATIOS_SCRIPT,
    }
    if kind not in scripts:
        raise ValidationError(f"Unknown plot script: {kind}")
    path = Path(directory) / f"plot_{kind}.py"
    with open(path, "w") as f:
        f.write(f"{HASH_PREFIX}{config_hash}\n")
        f.write(scripts[kind])
    return path


__all__ = [
    "HASH_PREFIX",
    "TIMESERIES_FILE",
    "COUPLINGS_FILE",
    "FAILURE_MARKER",
    "Checkpoint",
    "read_config_hash",
    "write_numeric_csv",
    "load_numeric_csv",
    "write_table_csv",
    "load_table_csv",
    "write_yaml",
    "load_yaml",
    "write_timeseries",
    "load_timeseries",
    "load_decay_series",
    "write_snapshots",
    "write_checkpoint",
    "load_checkpoint",
    "write_ledger",
    "write_mass_residual",
    "write_fit_report",
    "write_ratio_reports",
    "write_failure_marker",
    "write_config_echo",
    "write_plot_script",
]
