"""Cell-centered box grids with homogeneous Neumann closure.

Every operator works on arrays shaped like ``Grid.shape``. Boundary closure
is the even reflection ``phi[-1] = phi[0]``, which makes the flux through
each boundary face exactly zero. Inner products of gradients are taken over
faces, the same differences the Laplacian is assembled from, so that

    integrate(f * laplacian(g)) == -grad_inner(f, g)

holds up to rounding.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from crosstaxis.errors import ValidationError

logger = logging.getLogger("crosstaxis")


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on a box [0, L0] x ... x [0, L_{d-1}].

    Attributes:
        points_per_axis: Number of cells along each axis.
        lengths: Extent of the box along each axis.
    """

    points_per_axis: tuple[int, ...]
    lengths: tuple[float, ...]

    def __post_init__(self) -> None:
        points = tuple(self.points_per_axis)
        lengths = tuple(float(length) for length in self.lengths)
        if len(points) not in (1, 2, 3):
            raise ValidationError(
                f"Grid dimension must be 1, 2 or 3, got {len(points)}"
            )
        if len(lengths) != len(points):
            raise ValidationError(
                "Grid lengths and points_per_axis must have the same size"
            )
        for n in points:
            if isinstance(n, bool) or int(n) != n or n < 2:
                raise ValidationError(
                    f"points_per_axis entries must be integers >= 2, got {n}"
                )
        for length in lengths:
            if not math.isfinite(length) or length <= 0:
                raise ValidationError(
                    f"Grid lengths must be finite and > 0, got {length}"
                )
        object.__setattr__(self, "points_per_axis", tuple(map(int, points)))
        object.__setattr__(self, "lengths", lengths)

    @property
    def dim(self) -> int:
        return len(self.points_per_axis)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points_per_axis

    @property
    def size(self) -> int:
        return int(np.prod(self.points_per_axis))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            length / n
            for length, n in zip(self.lengths, self.points_per_axis)
        )

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        n = self.points_per_axis[axis]
        return (np.arange(n) + 0.5) * self.spacing[axis]

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Cell-center coordinate arrays shaped like the grid."""
        axes = [self.centers(k) for k in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(
            tuple(n * factor for n in self.points_per_axis), self.lengths
        )


@dataclass(frozen=True, eq=False)
class Field:
    """Immutable cell-centered grid function."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            if values.size != self.grid.size:
                raise ValidationError(
                    f"Field has {values.size} values, grid expects "
                    f"{self.grid.size}"
                )
            values = values.reshape(self.grid.shape, order="F")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "Field":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, func) -> "Field":
        """Sample ``func(x0, x1, ...)`` at cell centers."""
        return cls(grid, np.broadcast_to(func(*grid.mesh()), grid.shape))

    @classmethod
    def from_flat(cls, grid: Grid, flat: np.ndarray) -> "Field":
        """Inverse of ``flatten``: axis 0 varies fastest."""
        return cls(grid, np.reshape(flat, grid.shape, order="F"))

    def flatten(self) -> np.ndarray:
        """Values with axis 0 varying fastest."""
        return self.values.ravel(order="F")

    def _operand(self, other) -> np.ndarray | float:
        if isinstance(other, Field):
            if other.grid != self.grid:
                raise ValidationError("Fields live on different grids")
            return other.values
        return float(other)

    def __add__(self, other) -> "Field":
        return Field(self.grid, self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other) -> "Field":
        return Field(self.grid, self.values - self._operand(other))

    def __rsub__(self, other) -> "Field":
        return Field(self.grid, self._operand(other) - self.values)

    def __mul__(self, other) -> "Field":
        return Field(self.grid, self.values * self._operand(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)


@dataclass(frozen=True)
class NormBundle:
    """Discrete norms of one field.

    Attributes:
        l2: sqrt of the integral of f**2.
        linf: max |f|.
        h1_seminorm: L2 norm of the gradient.
        laplacian_l2: L2 norm of the Laplacian.
        grad_laplacian_l2: L2 norm of the gradient of the Laplacian.
        w22_equiv: sqrt(l2**2 + h1_seminorm**2 + laplacian_l2**2).
        mean: Average of f over the box.
    """

    l2: float
    linf: float
    h1_seminorm: float
    laplacian_l2: float
    grad_laplacian_l2: float
    w22_equiv: float
    mean: float


# ---------------------------------------------------------------------------
# Array-level kernels shared with the solver
# ---------------------------------------------------------------------------


def face_differences(
    values: np.ndarray, axis: int, spacing: float
) -> np.ndarray:
    """One-sided differences across interior faces along ``axis``."""
    return np.diff(values, axis=axis) / spacing


def face_divergence(
    flux: np.ndarray, axis: int, spacing: float
) -> np.ndarray:
    """Divergence of interior face fluxes with zero flux on boundary faces."""
    pad = [(0, 0)] * flux.ndim
    pad[axis] = (1, 1)
    return np.diff(np.pad(flux, pad), axis=axis) / spacing


def apply_laplacian(values: np.ndarray, grid: Grid) -> np.ndarray:
    result = np.zeros(grid.shape)
    for axis, h in enumerate(grid.spacing):
        result += face_divergence(face_differences(values, axis, h), axis, h)
    return result


def apply_taxis_divergence(
    c: np.ndarray, p: np.ndarray, grid: Grid
) -> np.ndarray:
    """div(c grad p) with arithmetic face averages of ``c``."""
    result = np.zeros(grid.shape)
    for axis, h in enumerate(grid.spacing):
        n = grid.shape[axis]
        c_face = 0.5 * (
            np.take(c, range(0, n - 1), axis=axis)
            + np.take(c, range(1, n), axis=axis)
        )
        flux = c_face * face_differences(p, axis, h)
        result += face_divergence(flux, axis, h)
    return result


def apply_gradient(values: np.ndarray, grid: Grid) -> list[np.ndarray]:
    """Cell-centered central differences with even-reflection ghosts."""
    components = []
    for axis, h in enumerate(grid.spacing):
        pad = [(0, 0)] * values.ndim
        pad[axis] = (1, 1)
        padded = np.pad(values, pad, mode="edge")
        n = grid.shape[axis]
        ahead = np.take(padded, range(2, n + 2), axis=axis)
        behind = np.take(padded, range(0, n), axis=axis)
        components.append((ahead - behind) / (2.0 * h))
    return components


def face_inner(a: np.ndarray, b: np.ndarray, grid: Grid) -> float:
    """Sum over faces of the products of face differences of a and b."""
    total = 0.0
    for axis, h in enumerate(grid.spacing):
        total += float(
            np.sum(
                face_differences(a, axis, h) * face_differences(b, axis, h)
            )
        )
    return total * grid.cell_volume


# ---------------------------------------------------------------------------
# Field-level operators
# ---------------------------------------------------------------------------


def _same_grid(f: Field, g: Field) -> None:
    if f.grid != g.grid:
        raise ValidationError("Fields live on different grids")


def laplacian(f: Field) -> Field:
    return Field(f.grid, apply_laplacian(f.values, f.grid))


def gradient(f: Field) -> tuple[Field, ...]:
    return tuple(
        Field(f.grid, component)
        for component in apply_gradient(f.values, f.grid)
    )


def taxis_divergence(c: Field, p: Field) -> Field:
    """Conservative discretization of div(c grad p)."""
    _same_grid(c, p)
    return Field(c.grid, apply_taxis_divergence(c.values, p.values, c.grid))


def hessian_frobenius(f: Field) -> Field:
    """Pointwise Frobenius norm of the discrete Hessian.

    Diagonal entries use the Laplacian's second differences, mixed entries
    the composition of central differences. Diagnostic accuracy only.
    """
    grid = f.grid
    first = apply_gradient(f.values, grid)
    total = np.zeros(grid.shape)
    for axis, h in enumerate(grid.spacing):
        second = face_divergence(
            face_differences(f.values, axis, h), axis, h
        )
        total += second**2
        for other in range(axis + 1, grid.dim):
            mixed = apply_gradient(first[axis], grid)[other]
            total += 2.0 * mixed**2
    return Field(grid, np.sqrt(total))


def integrate(f: Field) -> float:
    """Midpoint quadrature."""
    return float(np.sum(f.values)) * f.grid.cell_volume


def mean(f: Field) -> float:
    return integrate(f) / f.grid.volume


def grad_inner(f: Field, g: Field) -> float:
    _same_grid(f, g)
    return face_inner(f.values, g.values, f.grid)


def lap_inner(f: Field, g: Field) -> float:
    _same_grid(f, g)
    return integrate(laplacian(f) * laplacian(g))


def gradlap_inner(f: Field, g: Field) -> float:
    _same_grid(f, g)
    return face_inner(
        apply_laplacian(f.values, f.grid),
        apply_laplacian(g.values, g.grid),
        f.grid,
    )


def norms(f: Field) -> NormBundle:
    lap = apply_laplacian(f.values, f.grid)
    l2_sq = integrate(f * f)
    h1_sq = face_inner(f.values, f.values, f.grid)
    lap_sq = float(np.sum(lap * lap)) * f.grid.cell_volume
    gradlap_sq = face_inner(lap, lap, f.grid)
    return NormBundle(
        l2=math.sqrt(max(l2_sq, 0.0)),
        linf=float(np.max(np.abs(f.values))),
        h1_seminorm=math.sqrt(max(h1_sq, 0.0)),
        laplacian_l2=math.sqrt(max(lap_sq, 0.0)),
        grad_laplacian_l2=math.sqrt(max(gradlap_sq, 0.0)),
        w22_equiv=math.sqrt(max(l2_sq + h1_sq + lap_sq, 0.0)),
        mean=mean(f),
    )


__all__ = [
    "Grid",
    "Field",
    "NormBundle",
    "laplacian",
    "gradient",
    "taxis_divergence",
    "hessian_frobenius",
    "integrate",
    "mean",
    "grad_inner",
    "lap_inner",
    "gradlap_inner",
    "norms",
    "apply_laplacian",
    "apply_taxis_divergence",
    "apply_gradient",
    "face_differences",
    "face_divergence",
    "face_inner",
]
