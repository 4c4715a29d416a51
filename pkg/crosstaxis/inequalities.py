"""Empirical constants of the functional inequalities behind the energy method.

Each ratio divides the left-hand side of an inequality by its right-hand
side without the constant, so the best constant is the supremum of the
ratio over admissible fields. Sampling only bounds that supremum from below;
the refinement trend shows whether the discrete constants stay bounded.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from crosstaxis.errors import ConstantFieldError, ValidationError
from crosstaxis.grid import (
    Field,
    Grid,
    apply_gradient,
    apply_laplacian,
    face_inner,
    hessian_frobenius,
    mean,
    norms,
)

logger = logging.getLogger("crosstaxis")

POINCARE_IDS = ("poincare_l2", "poincare_gradient", "poincare_laplacian")
GN_IDS = ("gn_quartic", "gn_sextic", "gn_cubic")
INEQUALITY_IDS = POINCARE_IDS + ("w22_equivalence",) + GN_IDS
HESSIAN_ID = "hessian_cubic"

# Relative spread below which a field counts as constant
_CONSTANT_RTOL = 1e-13


@dataclass(frozen=True)
class TestFieldSpec:
    """Random cosine spectra for the inequality campaign.

    Attributes:
        seed: Base seed; sample i uses the stream (seed, i).
        max_mode: Largest cosine index per axis.
        decay: Spectral decay exponent, amplitude ~ (1 + |k|)^-decay.
        count: Number of random samples.
    """

    __test__ = False

    seed: int = 0
    max_mode: int = 8
    decay: float = 2.0
    count: int = 100

    def __post_init__(self) -> None:
        if self.max_mode < 1:
            raise ValidationError(
                f"max_mode must be >= 1, got {self.max_mode} (empty spectrum)"
            )
        if not (math.isfinite(self.decay) and self.decay >= 0):
            raise ValidationError(f"decay must be >= 0, got {self.decay}")
        if self.count < 0:
            raise ValidationError(f"count must be >= 0, got {self.count}")


@dataclass(frozen=True)
class RatioReport:
    """Sampled ratios of one inequality.

    Attributes:
        inequality_id: Name of the inequality.
        labels: Probe label per sample.
        ratios: Ratio per sample on the base grid.
        max_ratio: Largest ratio on the base grid.
        argmax_label: Label of the maximizing test field.
        refined_max_ratio: Largest ratio on the doubled grid.
        points: Cells per axis of the base grid.
    """

    inequality_id: str
    labels: tuple[str, ...]
    ratios: np.ndarray = field(repr=False)
    max_ratio: float
    argmax_label: str
    refined_max_ratio: float
    points: tuple[int, ...]

    @property
    def refinement_trend(self) -> float:
        """Refined maximum over base maximum."""
        return self.refined_max_ratio / self.max_ratio


def cosine_mode(grid: Grid, indices: tuple[int, ...]) -> np.ndarray:
    """prod_k cos(pi * indices[k] * x_k / L_k) at cell centers."""
    if len(indices) != grid.dim:
        raise ValidationError(
            f"Mode {indices} does not match grid dimension {grid.dim}"
        )
    result = np.ones(grid.shape)
    for k, x, length in zip(indices, grid.mesh(), grid.lengths):
        if k:
            result = result * np.cos(math.pi * k * x / length)
    return result


def sample_coefficients(
    spec: TestFieldSpec, dim: int, index: int
) -> np.ndarray:
    """Spectral coefficients of random sample ``index``; mode 0 is zero.

    The draw depends only on the spec and the index, so the same function
    is sampled on every grid.
    """
    rng = np.random.default_rng([spec.seed, index])
    shape = (spec.max_mode + 1,) * dim
    coefficients = rng.standard_normal(shape)
    wavenumbers = np.indices(shape)
    magnitude = np.sqrt(np.sum(wavenumbers**2, axis=0))
    coefficients *= (1.0 + magnitude) ** (-spec.decay)
    coefficients[(0,) * dim] = 0.0
    return coefficients


def _check_resolution(spec: TestFieldSpec, grid: Grid) -> None:
    if spec.max_mode >= min(grid.points_per_axis):
        raise ValidationError(
            f"max_mode {spec.max_mode} reaches the Nyquist limit of "
            f"{min(grid.points_per_axis)} cells"
        )


def random_test_field(spec: TestFieldSpec, grid: Grid, index: int) -> Field:
    _check_resolution(spec, grid)
    coefficients = sample_coefficients(spec, grid.dim, index)
    values = np.zeros(grid.shape)
    for indices in np.ndindex(coefficients.shape):
        if coefficients[indices]:
            values += coefficients[indices] * cosine_mode(grid, indices)
    return Field(grid, values)


def _test_fields(spec: TestFieldSpec, grid: Grid) -> list[tuple[str, Field]]:
    fields = []
    for axis in range(grid.dim):
        for k in range(1, spec.max_mode + 1):
            indices = tuple(k if a == axis else 0 for a in range(grid.dim))
            label = "mode_" + "_".join(map(str, indices))
            fields.append((label, Field(grid, cosine_mode(grid, indices))))
    for index in range(spec.count):
        fields.append(
            (f"random_{index:04d}", random_test_field(spec, grid, index))
        )
    return fields


def _centered(f: Field) -> np.ndarray:
    values = f.values
    scale = max(1.0, float(np.max(np.abs(values))))
    if float(np.ptp(values)) <= _CONSTANT_RTOL * scale:
        raise ConstantFieldError("Ratios are undefined for a constant field")
    return values - mean(f)


def _energies(f: Field) -> tuple[float, float, float, float]:
    """int (f - mean)^2, int |grad f|^2, int |lap f|^2, int |grad lap f|^2."""
    grid = f.grid
    centered = _centered(f)
    lap = apply_laplacian(f.values, grid)
    e0 = float(np.sum(centered**2)) * grid.cell_volume
    e1 = face_inner(f.values, f.values, grid)
    e2 = float(np.sum(lap**2)) * grid.cell_volume
    e3 = face_inner(lap, lap, grid)
    if min(e1, e2, e3) <= 0:
        raise ConstantFieldError("A derivative energy of the field vanishes")
    return e0, e1, e2, e3


def poincare_ratios(f: Field) -> tuple[float, float, float]:
    """The three ratios of the Poincare chain.

    (int (f - mean)^2 / int |grad f|^2,
     int |grad f|^2 / int |lap f|^2,
     int |lap f|^2 / int |grad lap f|^2)

    Raises:
        ConstantFieldError: If ``f`` is constant.
    """
    e0, e1, e2, e3 = _energies(f)
    return e0 / e1, e1 / e2, e2 / e3


def w22_equivalence_ratio(f: Field) -> float:
    """W22-equivalent norm of f - mean divided by the L2 norm of lap f."""
    centered = _centered(f)
    bundle = norms(Field(f.grid, centered))
    return bundle.w22_equiv / bundle.laplacian_l2


def gn_ratios(f: Field) -> tuple[float, float, float]:
    """Gagliardo-Nirenberg quotients with the L-infinity norm of f - mean.

    (int |grad f|^4 / (|f - mean|_inf^2 int |lap f|^2),
     int |grad f|^6 / (|f - mean|_inf^4 int |grad lap f|^2),
     int |lap f|^3 / (|f - mean|_inf int |grad lap f|^2))
    """
    grid = f.grid
    _, _, e2, e3 = _energies(f)
    linf = float(np.max(np.abs(_centered(f))))
    grad_sq = sum(c**2 for c in apply_gradient(f.values, grid))
    lap = apply_laplacian(f.values, grid)
    quartic = float(np.sum(grad_sq**2)) * grid.cell_volume
    sextic = float(np.sum(grad_sq**3)) * grid.cell_volume
    cubic = float(np.sum(np.abs(lap) ** 3)) * grid.cell_volume
    return (
        quartic / (linf**2 * e2),
        sextic / (linf**4 * e3),
        cubic / (linf * e3),
    )


def hessian_cubic_ratio(f: Field) -> float:
    """int |D^2 f|^3 / (|f - mean|_inf int |grad lap f|^2); diagnostic."""
    grid = f.grid
    _, _, _, e3 = _energies(f)
    linf = float(np.max(np.abs(_centered(f))))
    hessian = hessian_frobenius(f).values
    return float(np.sum(hessian**3)) * grid.cell_volume / (linf * e3)


def measured_poincare_constant(grid: Grid) -> float:
    """Largest first Poincare ratio over the lowest mode along each axis.

    The lowest cosine mode is an exact eigenvector of the discrete Neumann
    Laplacian, so this is the discrete Poincare constant of ``grid``.
    """
    best = 0.0
    for axis in range(grid.dim):
        indices = tuple(int(a == axis) for a in range(grid.dim))
        f = Field(grid, cosine_mode(grid, indices))
        best = max(best, poincare_ratios(f)[0])
    return best


def _all_ratios(f: Field, include_hessian: bool) -> dict[str, float]:
    ratios = dict(zip(POINCARE_IDS, poincare_ratios(f)))
    ratios["w22_equivalence"] = w22_equivalence_ratio(f)
    ratios.update(zip(GN_IDS, gn_ratios(f)))
    if include_hessian:
        ratios[HESSIAN_ID] = hessian_cubic_ratio(f)
    return ratios


def _evaluate(
    spec: TestFieldSpec, grid: Grid, include_hessian: bool
) -> tuple[list[str], dict[str, np.ndarray]]:
    labels = []
    rows = []
    for label, f in _test_fields(spec, grid):
        labels.append(label)
        rows.append(_all_ratios(f, include_hessian))
    columns = {
        name: np.array([row[name] for row in rows]) for name in rows[0]
    }
    return labels, columns


def estimate_constants(
    spec: TestFieldSpec, grid: Grid, include_hessian: bool = False
) -> dict[str, RatioReport]:
    """Largest sampled ratio of each inequality on ``grid`` and its refinement.

    Probes are the pure single-axis modes 1..max_mode followed by
    ``spec.count`` random fields.
    """
    labels, base = _evaluate(spec, grid, include_hessian)
    _, refined = _evaluate(spec, grid.refined(2), include_hessian)

    reports = {}
    for name, ratios in base.items():
        best = int(np.argmax(ratios))
        reports[name] = RatioReport(
            inequality_id=name,
            labels=tuple(labels),
            ratios=ratios,
            max_ratio=float(ratios[best]),
            argmax_label=labels[best],
            refined_max_ratio=float(np.max(refined[name])),
            points=grid.points_per_axis,
        )
        logger.info(
            f"{name}: max {ratios[best]:.6g} at {labels[best]}, "
            f"refined {reports[name].refined_max_ratio:.6g}"
        )
    return reports


__all__ = [
    "INEQUALITY_IDS",
    "HESSIAN_ID",
    "TestFieldSpec",
    "RatioReport",
    "cosine_mode",
    "sample_coefficients",
    "random_test_field",
    "poincare_ratios",
    "w22_equivalence_ratio",
    "gn_ratios",
    "hessian_cubic_ratio",
    "measured_poincare_constant",
    "estimate_constants",
]
