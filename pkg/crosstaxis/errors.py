"""Exception types raised across crosstaxis.

Validation problems derive from ``ValueError`` and runtime failures from
``RuntimeError`` so callers that only know the builtin families keep working.
"""


class ValidationError(ValueError):
    """Inadmissible parameters, grids, weights or configuration values."""


class ConstantFieldError(ValueError):
    """A ratio was requested for a field whose denominators vanish."""


class PerturbationError(ValueError):
    """The requested initial perturbation cannot be realized."""


class FitError(ValueError):
    """A decay series is unusable for the requested fit."""


class SolverError(RuntimeError):
    """Base class for failures while advancing a simulation."""


class StepRejected(SolverError):
    """The explicit taxis estimate exceeded the stability guard."""

    def __init__(self, cfl: float, guard: float, suggested_dt: float):
        self.cfl = cfl
        self.guard = guard
        self.suggested_dt = suggested_dt
        super().__init__(
            f"CFL number {cfl:.4g} exceeds guard {guard:.4g}; "
            f"retry with dt <= {suggested_dt:.6g}"
        )


class LinearSolveError(SolverError):
    """Conjugate gradients failed to reach the requested tolerance."""

    def __init__(self, info: int, message: str = ""):
        self.info = info
        super().__init__(
            message or f"Conjugate gradient did not converge (info={info})"
        )


class BlowUpError(SolverError):
    """A field left the configured overflow bound or became non-finite."""

    def __init__(self, t: float, max_value: float, bound: float):
        self.t = t
        self.max_value = max_value
        self.bound = bound
        super().__init__(
            f"Blow-up sentinel tripped at t={t:.6g}: "
            f"max value {max_value:.6g} exceeds bound {bound:.6g}"
        )


class StageError(RuntimeError):
    """A harness stage failed; the original exception is chained."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"Stage '{stage}' failed: {message}")


__all__ = [
    "ValidationError",
    "ConstantFieldError",
    "PerturbationError",
    "FitError",
    "SolverError",
    "StepRejected",
    "LinearSolveError",
    "BlowUpError",
    "StageError",
]
