"""Five-point finite differences for ``-lap(u) = f`` on the unit square."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .discretize import Grid2D, uniform_grid_2d
from .linalg import CsrMatrix, cg_solve, csr_from_arrays, lu_solve, spmv


@dataclass(frozen=True)
class SolveReport:
    solver: str
    iterations: int
    relative_residual: float
    wall_time: float
    converged: bool = True


@dataclass(frozen=True)
class FieldOnGrid:
    grid: Grid2D
    values: np.ndarray  # (N+2, N+2), indexed [i, j] <-> (x_i, y_j)

    def interior(self) -> np.ndarray:
        return self.values[1:-1, 1:-1]


def _stencil_pattern(N: int):
    """Rows, cols, vals of the 5-point matrix plus the boundary-neighbour list."""
    i, j = np.meshgrid(np.arange(1, N + 1), np.arange(1, N + 1), indexing="xy")
    i, j = i.ravel(), j.ravel()
    k = (j - 1) * N + (i - 1)
    rows, cols, vals = [k], [k], [np.full(k.shape, 4.0)]
    bnd_rows, bnd_i, bnd_j = [], [], []
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        ni, nj = i + di, j + dj
        inside = (ni >= 1) & (ni <= N) & (nj >= 1) & (nj <= N)
        rows.append(k[inside])
        cols.append((nj[inside] - 1) * N + (ni[inside] - 1))
        vals.append(np.full(inside.sum(), -1.0))
        bnd_rows.append(k[~inside])
        bnd_i.append(ni[~inside])
        bnd_j.append(nj[~inside])
    return (
        np.concatenate(rows),
        np.concatenate(cols),
        np.concatenate(vals),
        np.concatenate(bnd_rows),
        np.concatenate(bnd_i),
        np.concatenate(bnd_j),
    )


def assemble_fdm_poisson(grid: Grid2D, f, g) -> tuple[CsrMatrix, np.ndarray]:
    """Assemble ``4u_ij - sum(neighbours) = h^2 f_ij`` for the interior unknowns.

    ``f(x, y)`` and ``g(x, y)`` are vectorised callables sampled at the nodes.
    Known boundary neighbours are moved to the right-hand side.
    """
    N, h = grid.N, grid.h
    rows, cols, vals, brow, bi, bj = _stencil_pattern(N)
    A = csr_from_arrays(rows, cols, vals, N * N)

    pts = grid.interior_points()
    b = h * h * np.broadcast_to(np.asarray(f(pts[:, 0], pts[:, 1]), float), (N * N,)).astype(float)
    gvals = np.broadcast_to(np.asarray(g(bi * h, bj * h), float), brow.shape)
    np.add.at(b, brow, gvals)
    return A, b


def solve_fdm_poisson(N: int, f, g, solver: str = "cg", tol: float = 1e-10) -> tuple[FieldOnGrid, SolveReport]:
    """Solve the Dirichlet Poisson problem on an ``N x N`` interior grid.

    ``solver`` is ``"cg"`` (sparse conjugate gradients) or ``"lu"`` (dense
    LU, intended for oracle checks on small grids).
    """
    grid = uniform_grid_2d(N)
    start = time.perf_counter()
    A, b = assemble_fdm_poisson(grid, f, g)
    if solver == "cg":
        res = cg_solve(A, b, tol=tol)
        u, iterations, converged = res.x, res.iterations, res.converged
    elif solver == "lu":
        u = lu_solve(A.toarray(), b)
        iterations, converged = 0, True
    else:
        raise ValueError(f"unknown solver {solver!r}")
    bnorm = np.linalg.norm(b)
    rel = float(np.linalg.norm(b - spmv(A, u)) / bnorm) if bnorm > 0 else float(np.linalg.norm(spmv(A, u)))
    elapsed = time.perf_counter() - start

    X, Y = grid.mesh()
    U = np.zeros((N + 2, N + 2))
    mask = grid.boundary_mask()
    U[mask] = np.broadcast_to(np.asarray(g(X[mask], Y[mask]), float), mask.sum())
    # linear index is (j-1)*N + (i-1), so reshape gives [j, i]
    U[1:-1, 1:-1] = u.reshape(N, N).T
    report = SolveReport(solver, iterations, rel, elapsed, converged)
    return FieldOnGrid(grid, U), report
