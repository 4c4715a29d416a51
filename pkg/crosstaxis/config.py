import copy
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Literal

import yaml

from crosstaxis.errors import ValidationError
from crosstaxis.grid import Grid
from crosstaxis.inequalities import TestFieldSpec
from crosstaxis.model import Parameters
from crosstaxis.solver import ModeSpec, Scheme, StepControl

# Valid log levels for configuration
VALID_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}

CONFIG_ENV = "CROSSTAXIS_CONFIG"
DEFAULT_CONFIG_PATH = "config.yaml"


@dataclass
class ParametersConfig:
    """Model coefficients and, under H1, the prescribed masses."""

    D1: float = 1.0
    D2: float = 1.0
    chi1: float = 1.0
    chi2: float = 1.0
    lambda1: float = 0.0
    lambda2: float = 0.0
    mu1: float = 0.0
    mu2: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    m1: float = 1.0
    m2: float = 1.0

    def __post_init__(self) -> None:
        self.to_parameters()

    def to_parameters(self) -> Parameters:
        return Parameters(**asdict(self))


@dataclass
class GridConfig:
    """Cells per axis and box lengths; their sizes fix the dimension."""

    points: list[int] = field(default_factory=lambda: [256])
    lengths: list[float] = field(default_factory=lambda: [1.0])

    def __post_init__(self) -> None:
        self.to_grid()

    def to_grid(self) -> Grid:
        return Grid(tuple(self.points), tuple(self.lengths))


@dataclass
class ModeConfig:
    indices: list[int] = field(default_factory=lambda: [1])
    amplitude: float = 1.0
    component: str = "both"

    def __post_init__(self) -> None:
        self.to_mode_spec()

    def to_mode_spec(self) -> ModeSpec:
        return ModeSpec(tuple(self.indices), self.amplitude, self.component)


@dataclass
class PerturbationConfig:
    """Initial perturbation of the steady state.

    Attributes:
        epsilon: W22 distance budget of the initial data.
        modes: Cosine modes combined into the perturbation.
        seed: Seed of the per-mode random coefficients.
        fold_negative: Shift perturbations of a zero steady component so
            they stay nonnegative.
    """

    epsilon: float = 1e-2
    modes: list[ModeConfig] = field(
        default_factory=lambda: [ModeConfig([1]), ModeConfig([2])]
    )
    seed: int = 0
    fold_negative: bool = True

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValidationError(
                f"perturbation.epsilon must be > 0, got {self.epsilon}"
            )
        if not self.modes:
            raise ValidationError("perturbation.modes must not be empty")
        self.modes = [
            ModeConfig(**mode) if isinstance(mode, dict) else mode
            for mode in self.modes
        ]


@dataclass
class SteppingConfig:
    """Time stepping.

    Attributes:
        scheme: imex_euler or strang_imex.
        dt: Time step.
        t_end: Final time.
        sample_every: Time between recorded samples, a multiple of dt.
        cfl_guard: Largest accepted explicit taxis CFL number.
        clip_negative: Clip negative values after each step.
        overflow_bound: Blow-up sentinel threshold.
    """

    scheme: str = "imex_euler"
    dt: float = 0.01
    t_end: float = 50.0
    sample_every: float = 0.25
    cfl_guard: float = 0.25
    clip_negative: bool = True
    overflow_bound: float = 1e6

    def __post_init__(self) -> None:
        try:
            Scheme(self.scheme)
        except ValueError:
            raise ValidationError(f"Invalid scheme: {self.scheme}")
        if not self.t_end > 0:
            raise ValidationError("stepping.t_end must be > 0")
        if not self.sample_every > 0:
            raise ValidationError("stepping.sample_every must be > 0")
        if not self.overflow_bound > 0:
            raise ValidationError("stepping.overflow_bound must be > 0")
        self.to_step_control()

    def to_step_control(self) -> StepControl:
        return StepControl(
            dt=self.dt,
            scheme=Scheme(self.scheme),
            clip_negative=self.clip_negative,
            stability_guard=self.cfl_guard,
        )


@dataclass
class MonitoringConfig:
    """Energy monitoring.

    Attributes:
        eta: Width of the L-infinity tube; None picks a default from the
            steady state.
        weights: "regime" for the regime table, or a mapping of explicit
            A1..C2 (and X2) values.
        tail_fraction: Share of samples, counted from the end, used in fits.
    """

    eta: float | None = None
    weights: str | dict[str, float] = "regime"
    tail_fraction: float = 0.8

    def __post_init__(self) -> None:
        if self.eta is not None and not self.eta > 0:
            raise ValidationError(
                f"monitoring.eta must be > 0, got {self.eta}"
            )
        if isinstance(self.weights, str) and self.weights != "regime":
            raise ValidationError(
                f"monitoring.weights must be 'regime' or a mapping, "
                f"got {self.weights}"
            )
        if not 0 < self.tail_fraction <= 1:
            raise ValidationError("monitoring.tail_fraction must be in (0, 1]")


@dataclass
class OutputsConfig:
    directory: str = "results"
    snapshot_times: list[float] = field(default_factory=list)
    plot_scripts: bool = True


@dataclass
class InequalitiesConfig:
    """Inequality campaign: random spectra and the grid they live on."""

    seed: int = 0
    max_mode: int = 8
    decay: float = 2.0
    count: int = 100
    points: list[int] = field(default_factory=lambda: [128])
    lengths: list[float] = field(default_factory=lambda: [1.0])
    include_hessian: bool = False

    def __post_init__(self) -> None:
        self.to_spec()
        self.to_grid()

    def to_spec(self) -> TestFieldSpec:
        return TestFieldSpec(
            seed=self.seed,
            max_mode=self.max_mode,
            decay=self.decay,
            count=self.count,
        )

    def to_grid(self) -> Grid:
        return Grid(tuple(self.points), tuple(self.lengths))


@dataclass
class ExperimentConfig:
    """Configuration of one experiment.

    Attributes:
        name: Label echoed into every output.
        log_level: Logging level for the application.
        parameters: Model coefficients.
        grid: Spatial grid.
        perturbation: Initial data around the steady state.
        stepping: Time integration.
        monitoring: Functional monitoring and fit window.
        outputs: Output directory and snapshot times.
        inequalities: Inequality campaign settings.
    """

    name: str = "experiment"
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = (
        "INFO"
    )
    parameters: ParametersConfig = field(default_factory=ParametersConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    perturbation: PerturbationConfig = field(
        default_factory=PerturbationConfig
    )
    stepping: SteppingConfig = field(default_factory=SteppingConfig)
    monitoring: MonitoringConfig = field(default_factory=MonitoringConfig)
    outputs: OutputsConfig = field(default_factory=OutputsConfig)
    inequalities: InequalitiesConfig = field(
        default_factory=InequalitiesConfig
    )

    def __post_init__(self) -> None:
        # Validate log level
        if self.log_level not in VALID_LOG_LEVELS:
            raise ValidationError(f"Invalid log level: {self.log_level}")

        # Convert dicts to config objects if needed
        for block in fields(self):
            value = getattr(self, block.name)
            block_type = _BLOCKS.get(block.name)
            if block_type is not None and isinstance(value, dict):
                setattr(self, block.name, block_type(**value))


_BLOCKS = {
    "parameters": ParametersConfig,
    "grid": GridConfig,
    "perturbation": PerturbationConfig,
    "stepping": SteppingConfig,
    "monitoring": MonitoringConfig,
    "outputs": OutputsConfig,
    "inequalities": InequalitiesConfig,
}


def parse_scalar(raw: str) -> Any:
    value = yaml.safe_load(raw)
    # YAML 1.1 reads exponent floats without a dot, like 1e-3, as strings
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    return value


def set_dotted(data: dict, key: str, value: Any) -> None:
    """Assign ``value`` to a dotted key, creating missing blocks."""
    *parents, leaf = key.strip().split(".")
    target = data
    for part in parents:
        child = target.setdefault(part, {})
        if not isinstance(child, dict):
            raise ValidationError(f"Override key {key} is not a block")
        target = child
    target[leaf] = value


def apply_overrides(data: dict, overrides: list[str]) -> dict:
    """Set dotted keys, e.g. ``parameters.lambda2=0.5``, on a raw mapping.

    Values are parsed as YAML scalars. Returns a new mapping.
    """
    result = copy.deepcopy(data)
    for override in overrides:
        key, sep, raw = override.partition("=")
        if not sep or not key:
            raise ValidationError(
                f"Override must look like KEY=VALUE, got {override!r}"
            )
        set_dotted(result, key, parse_scalar(raw))
    return result


def config_from_dict(data: dict | None) -> ExperimentConfig:
    try:
        return ExperimentConfig(**(data or {}))
    except Exception as e:
        raise ValidationError(f"Error loading config: {e}") from e


def load_config(
    config_path: str | None = None, overrides: list[str] | None = None
) -> ExperimentConfig:
    """Load an experiment configuration from a YAML file.

    Uses the CROSSTAXIS_CONFIG environment variable or 'config.yaml' as
    default path.

    Args:
        config_path: Optional path to the configuration file.
        overrides: Dotted KEY=VALUE assignments applied before validation.

    Returns:
        ExperimentConfig: The loaded configuration object

    Raises:
        FileNotFoundError: If the configuration file doesn't exist
        ValidationError: If the configuration file contains invalid data
    """
    config_path = config_path or os.getenv(CONFIG_ENV, DEFAULT_CONFIG_PATH)
    if not os.path.exists(config_path):
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_path) as f:
        config_data = yaml.safe_load(f) or {}
    if not isinstance(config_data, dict):
        raise ValidationError(f"Config file {config_path} is not a mapping")

    return config_from_dict(apply_overrides(config_data, overrides or []))


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    return asdict(config)


def dump_config(config: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=True)


def config_hash(config: ExperimentConfig) -> str:
    """First 16 hex digits of the SHA-256 of the canonical JSON form."""
    canonical = json.dumps(
        config_to_dict(config), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def with_overrides(
    config: ExperimentConfig, overrides: list[str]
) -> ExperimentConfig:
    """A validated copy of ``config`` with dotted overrides applied."""
    return config_from_dict(
        apply_overrides(config_to_dict(config), overrides)
    )


def with_values(
    config: ExperimentConfig, values: dict[str, Any]
) -> ExperimentConfig:
    """A validated copy of ``config`` with typed values at dotted keys."""
    data = config_to_dict(config)
    for key, value in values.items():
        set_dotted(data, key, value)
    return config_from_dict(data)


def has_key(config: ExperimentConfig, key: str) -> bool:
    target: Any = config_to_dict(config)
    for part in key.split("."):
        if not isinstance(target, dict) or part not in target:
            return False
        target = target[part]
    return True


__all__ = [
    "VALID_LOG_LEVELS",
    "ExperimentConfig",
    "ParametersConfig",
    "GridConfig",
    "ModeConfig",
    "PerturbationConfig",
    "SteppingConfig",
    "MonitoringConfig",
    "OutputsConfig",
    "InequalitiesConfig",
    "apply_overrides",
    "parse_scalar",
    "config_from_dict",
    "load_config",
    "config_to_dict",
    "dump_config",
    "config_hash",
    "with_overrides",
    "with_values",
    "has_key",
    "set_dotted",
]
