"""Parameter sweeps for the crosstaxis CLI."""

from .main import SWEEP_FILE, SweepRow, run_sweep, sweep_key

__all__ = [
    "SWEEP_FILE",
    "SweepRow",
    "run_sweep",
    "sweep_key",
]
