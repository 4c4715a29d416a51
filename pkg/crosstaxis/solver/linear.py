"""Implicit diffusion solves on the Neumann grid."""

import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from crosstaxis.errors import LinearSolveError
from crosstaxis.grid import Grid

logger = logging.getLogger("crosstaxis")


def neumann_laplacian_matrix(grid: Grid) -> sp.csr_matrix:
    """Sparse Laplacian acting on fields flattened with axis 0 fastest."""
    factors = []
    for n, h in zip(grid.points_per_axis, grid.spacing):
        main = np.full(n, -2.0)
        main[0] = main[-1] = -1.0
        off = np.ones(n - 1)
        factors.append(
            sp.diags([off, main, off], [-1, 0, 1], format="csr") / h**2
        )

    total = sp.csr_matrix((grid.size, grid.size))
    for axis in range(grid.dim):
        term = sp.identity(1, format="csr")
        for other in reversed(range(grid.dim)):
            if other == axis:
                block = factors[other]
            else:
                block = sp.identity(grid.points_per_axis[other], format="csr")
            term = sp.kron(term, block, format="csr")
        total = total + term
    return total.tocsr()


class DiffusionSolver:
    """Solves (I - coefficient * Lap) x = b by preconditioned CG.

    The operator maps constants to themselves and zero-mean fields to
    zero-mean fields, so the mean of ``b`` is split off before the solve
    and added back afterwards. An incomplete LU factorization of the same
    matrix serves as preconditioner.
    """

    def __init__(
        self,
        grid: Grid,
        coefficient: float,
        rtol: float = 1e-10,
        maxiter: int = 2000,
    ):
        self.grid = grid
        self.coefficient = coefficient
        self.rtol = rtol
        self.maxiter = maxiter
        self.matrix = (
            sp.identity(grid.size, format="csr")
            - coefficient * neumann_laplacian_matrix(grid)
        ).tocsr()
        ilu = spla.spilu(self.matrix.tocsc(), drop_tol=1e-12, fill_factor=20)
        self.preconditioner = spla.LinearOperator(
            self.matrix.shape, matvec=ilu.solve
        )
        self.iterations = 0

    def _count(self, _xk: np.ndarray) -> None:
        self.iterations += 1

    def solve(
        self, rhs: np.ndarray, guess: np.ndarray | None = None
    ) -> np.ndarray:
        flat = np.ravel(rhs, order="F")
        shift = float(np.mean(flat))
        centered = flat - shift
        x0 = None
        if guess is not None:
            x0 = np.ravel(guess, order="F")
            x0 = x0 - np.mean(x0)

        self.iterations = 0
        solution, info = spla.cg(
            self.matrix,
            centered,
            x0=x0,
            rtol=self.rtol,
            atol=0.0,
            maxiter=self.maxiter,
            M=self.preconditioner,
            callback=self._count,
        )
        if info != 0:
            raise LinearSolveError(info)
        logger.debug(f"CG converged in {self.iterations} iterations")

        solution = solution - np.mean(solution) + shift
        return np.reshape(solution, self.grid.shape, order="F")


__all__ = ["DiffusionSolver", "neumann_laplacian_matrix"]
