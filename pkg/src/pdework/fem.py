"""Linear triangular finite elements for ``-lap(u) = f`` with Dirichlet data."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .discretize import TriMesh, triangulate_unit_square
from .errors import GeometryError
from .fdm import SolveReport
from .linalg import CsrMatrix, cg_solve, csr_from_arrays, spmv

MIN_AREA = 1e-14


@dataclass(frozen=True)
class FemSolution:
    mesh: TriMesh
    nodal_values: np.ndarray


def _gradients(p1, p2, p3):
    """Area and the (constant) barycentric basis gradients of one triangle."""
    p1, p2, p3 = (np.asarray(p, float) for p in (p1, p2, p3))
    area2 = (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p3[0] - p1[0]) * (p2[1] - p1[1])
    if abs(area2) / 2 <= MIN_AREA:
        raise GeometryError(f"degenerate triangle {p1}, {p2}, {p3}")
    # grad(phi_i) = rot90(opposite edge) / (2 * area)
    grads = np.array(
        [
            [p2[1] - p3[1], p3[0] - p2[0]],
            [p3[1] - p1[1], p1[0] - p3[0]],
            [p1[1] - p2[1], p2[0] - p1[0]],
        ]
    ) / area2
    return abs(area2) / 2, grads


def element_stiffness(p1, p2, p3) -> np.ndarray:
    area, grads = _gradients(p1, p2, p3)
    return area * grads @ grads.T


def element_load(p1, p2, p3, f) -> np.ndarray:
    """One-point centroid rule: every entry is ``f(centroid) * area / 3``."""
    area, _ = _gradients(p1, p2, p3)
    c = (np.asarray(p1, float) + np.asarray(p2, float) + np.asarray(p3, float)) / 3
    return np.full(3, float(f(c[0], c[1])) * area / 3)


def _batched_elements(mesh: TriMesh):
    p = mesh.nodes[mesh.elements]  # (K, 3, 2)
    area2 = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (p[:, 2, 0] - p[:, 0, 0]) * (
        p[:, 1, 1] - p[:, 0, 1]
    )
    if np.any(area2 / 2 <= MIN_AREA):
        raise GeometryError("mesh contains degenerate or clockwise elements")
    nxt, prv = p[:, [1, 2, 0]], p[:, [2, 0, 1]]
    grads = np.stack([nxt[..., 1] - prv[..., 1], prv[..., 0] - nxt[..., 0]], axis=-1) / area2[:, None, None]
    return area2 / 2, grads, p.mean(axis=1)


def assemble_fem(mesh: TriMesh, f) -> tuple[CsrMatrix, np.ndarray]:
    """Global stiffness matrix and load vector, before boundary conditions."""
    area, grads, centroids = _batched_elements(mesh)
    K = area[:, None, None] * np.einsum("kid,kjd->kij", grads, grads)
    fc = np.broadcast_to(np.asarray(f(centroids[:, 0], centroids[:, 1]), float), area.shape)
    loads = np.repeat((fc * area / 3)[:, None], 3, axis=1)

    el = mesh.elements
    rows = np.repeat(el, 3, axis=1)
    cols = np.tile(el, (1, 3))
    A = csr_from_arrays(rows.ravel(), cols.ravel(), K.reshape(len(el), 9).ravel(), mesh.n_nodes)
    b = np.zeros(mesh.n_nodes)
    np.add.at(b, el.ravel(), loads.ravel())
    return A, b


def apply_dirichlet(A: CsrMatrix, b, boundary, values) -> tuple[CsrMatrix, np.ndarray]:
    """Impose ``u[boundary] = values`` while keeping the matrix symmetric.

    Boundary rows become identity rows; the known boundary columns are
    eliminated from the remaining rows and moved to the right-hand side.
    """
    boundary = np.asarray(boundary, dtype=np.int64)
    values = np.broadcast_to(np.asarray(values, float), boundary.shape)
    g = np.zeros(A.n)
    g[boundary] = values
    is_bnd = np.zeros(A.n, dtype=bool)
    is_bnd[boundary] = True

    rows, cols, vals = A.triplets()
    b = np.asarray(b, float) - spmv(A, g)
    keep = ~is_bnd[rows] & ~is_bnd[cols]
    rows = np.concatenate([rows[keep], boundary])
    cols = np.concatenate([cols[keep], boundary])
    vals = np.concatenate([vals[keep], np.ones(len(boundary))])
    b[boundary] = values
    return csr_from_arrays(rows, cols, vals, A.n), b


def solve_fem_poisson(n: int, f, g, tol: float = 1e-12) -> tuple[FemSolution, SolveReport]:
    mesh = triangulate_unit_square(n)
    start = time.perf_counter()
    A, b = assemble_fem(mesh, f)
    bn = mesh.boundary_nodes
    gvals = np.broadcast_to(np.asarray(g(mesh.nodes[bn, 0], mesh.nodes[bn, 1]), float), bn.shape)
    A, b = apply_dirichlet(A, b, bn, gvals)
    res = cg_solve(A, b, tol=tol)
    u = res.x
    u[bn] = gvals
    report = SolveReport("cg", res.iterations, res.relative_residual, time.perf_counter() - start, res.converged)
    return FemSolution(mesh, u), report


def nodal_gradients(mesh: TriMesh, u) -> np.ndarray:
    """Piecewise-constant gradient of the P1 field on every element, shape (K, 2)."""
    _, grads, _ = _batched_elements(mesh)
    return np.einsum("kid,ki->kd", grads, np.asarray(u, float)[mesh.elements])
