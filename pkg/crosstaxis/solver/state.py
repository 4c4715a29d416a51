import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from crosstaxis.errors import ValidationError
from crosstaxis.functionals import CouplingRecord, FunctionalRecord
from crosstaxis.grid import Field, Grid


class Scheme(Enum):
    """Supported time-stepping schemes."""

    IMEX_EULER = "imex_euler"
    STRANG_IMEX = "strang_imex"


@dataclass(frozen=True)
class SimState:
    """Predator density u, prey density v and time t."""

    u: Field
    v: Field
    t: float = 0.0

    def __post_init__(self) -> None:
        if self.u.grid != self.v.grid:
            raise ValidationError("u and v must live on the same grid")
        if not math.isfinite(self.t):
            raise ValidationError("Time must be finite")
        object.__setattr__(self, "t", float(self.t))

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @classmethod
    def from_arrays(
        cls, grid: Grid, u: np.ndarray, v: np.ndarray, t: float = 0.0
    ) -> "SimState":
        return cls(Field(grid, u), Field(grid, v), t)


@dataclass(frozen=True)
class StepControl:
    """Time-step settings.

    Attributes:
        dt: Time step.
        scheme: Stepping scheme.
        clip_negative: Clip negative values produced by explicit terms.
        stability_guard: Largest accepted explicit taxis CFL number.
        cg_rtol: Relative residual target of the implicit diffusion solves.
        cg_maxiter: Iteration cap of each conjugate-gradient solve.
    """

    dt: float
    scheme: Scheme = Scheme.IMEX_EULER
    clip_negative: bool = True
    stability_guard: float = 0.25
    cg_rtol: float = 1e-10
    cg_maxiter: int = 2000

    def __post_init__(self) -> None:
        if isinstance(self.scheme, str):
            try:
                object.__setattr__(self, "scheme", Scheme(self.scheme))
            except ValueError:
                raise ValidationError(f"Invalid scheme: {self.scheme}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if not 0 < self.stability_guard <= 1:
            raise ValidationError(
                f"stability_guard must lie in (0, 1], got "
                f"{self.stability_guard}"
            )
        if not 0 < self.cg_rtol < 1:
            raise ValidationError("cg_rtol must lie in (0, 1)")
        if self.cg_maxiter < 1:
            raise ValidationError("cg_maxiter must be >= 1")


@dataclass(frozen=True)
class TimeSeries:
    """Samples recorded along one trajectory.

    Attributes:
        records: Functional values per sample.
        couplings: Cross integrals per sample, aligned with ``records``.
        snapshots: Full states captured at the configured snapshot times.
        exit_time: First sample time outside the eta-tube, if any.
        clipped_mass: Total mass removed by clipping.
        final_state: State at the end of the run.
    """

    records: tuple[FunctionalRecord, ...]
    couplings: tuple[CouplingRecord, ...]
    snapshots: tuple[SimState, ...] = ()
    exit_time: float | None = None
    clipped_mass: float = 0.0
    final_state: SimState | None = None
    times: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "couplings", tuple(self.couplings))
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        if len(self.records) != len(self.couplings):
            raise ValidationError("records and couplings must align")
        times = np.array([r.t for r in self.records], dtype=float)
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValidationError("Sample times must be strictly increasing")
        if self.exit_time is not None and times.size:
            if not times[0] <= self.exit_time <= times[-1]:
                raise ValidationError(
                    "exit_time must lie within the simulated span"
                )
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        """One FunctionalRecord or CouplingRecord field as an array."""
        if name in FunctionalRecord.__dataclass_fields__:
            items = self.records
        elif name in CouplingRecord.__dataclass_fields__:
            items = self.couplings
        else:
            raise KeyError(name)
        return np.array([getattr(item, name) for item in items], dtype=float)

    def distances(self) -> np.ndarray:
        """w22_u + w22_v per sample."""
        return self.column("w22_u") + self.column("w22_v")
