"""Grids, meshes and Chebyshev collocation operators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError


@dataclass(frozen=True)
class Grid2D:
    """Uniform grid on the unit square with ``N`` interior points per direction.

    Nodes sit at ``(i*h, j*h)`` for ``i, j = 0..N+1``.  Interior node ``(i, j)``
    with ``1 <= i, j <= N`` maps to the linear index ``(j-1)*N + (i-1)``
    (x varies fastest).
    """

    N: int

    @property
    def h(self) -> float:
        return 1.0 / (self.N + 1)

    @property
    def n_interior(self) -> int:
        return self.N * self.N

    @property
    def coords(self) -> np.ndarray:
        """1D node coordinates ``0, h, ..., 1``."""
        return np.arange(self.N + 2) * self.h

    def index(self, i, j):
        return (np.asarray(j) - 1) * self.N + (np.asarray(i) - 1)

    def ij(self, k):
        k = np.asarray(k)
        return k % self.N + 1, k // self.N + 1

    def mesh(self):
        """``(X, Y)`` arrays of shape ``(N+2, N+2)`` indexed ``[i, j]``."""
        return np.meshgrid(self.coords, self.coords, indexing="ij")

    def interior_points(self) -> np.ndarray:
        i, j = self.ij(np.arange(self.n_interior))
        return np.column_stack([i * self.h, j * self.h])

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros((self.N + 2, self.N + 2), dtype=bool)
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
        return mask


def uniform_grid_2d(N: int) -> Grid2D:
    if int(N) != N or N < 1:
        raise ValueError(f"need at least one interior point per direction, got N={N}")
    return Grid2D(int(N))


@dataclass(frozen=True)
class TriMesh:
    nodes: np.ndarray  # (M, 2)
    elements: np.ndarray  # (K, 3), counterclockwise
    boundary_nodes: np.ndarray  # sorted node indices on the boundary

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.elements]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def edges(self) -> dict:
        """Map each undirected edge ``(a, b)``, ``a < b``, to its element count."""
        counts: dict = {}
        for tri in self.elements:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(a, b), max(a, b))
                counts[key] = counts.get(key, 0) + 1
        return counts


def triangulate_unit_square(n: int) -> TriMesh:
    """Structured triangulation of ``[0, 1]^2`` with ``n`` cells per side.

    Every square cell is cut along its lower-left to upper-right diagonal.
    Node ``(i, j)`` at ``(i/n, j/n)`` has index ``j*(n+1) + i``.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"need at least one cell per direction, got n={n}")
    n = int(n)
    t = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(t, t, indexing="xy")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    i, j = i.ravel(), j.ravel()
    sw = j * (n + 1) + i
    se = sw + 1
    nw = sw + (n + 1)
    ne = nw + 1
    lower = np.column_stack([sw, se, ne])
    upper = np.column_stack([sw, ne, nw])
    elements = np.empty((2 * n * n, 3), dtype=np.int64)
    elements[0::2] = lower
    elements[1::2] = upper

    on_edge = (
        np.isclose(nodes[:, 0], 0.0)
        | np.isclose(nodes[:, 0], 1.0)
        | np.isclose(nodes[:, 1], 0.0)
        | np.isclose(nodes[:, 1], 1.0)
    )
    return TriMesh(nodes=nodes, elements=elements, boundary_nodes=np.flatnonzero(on_edge))


@dataclass(frozen=True)
class Interval1D:
    """Strictly increasing 1D node array."""

    nodes: np.ndarray = field()

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        if x.ndim != 1 or len(x) < 2:
            raise StructuralError("need at least two nodes")
        if not np.all(np.diff(x) > 0):
            raise StructuralError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", x)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @classmethod
    def uniform(cls, n_cells: int, left: float = 0.0, right: float = 1.0) -> "Interval1D":
        return cls(np.linspace(left, right, n_cells + 1))


def cgl_nodes(N: int) -> np.ndarray:
    """Chebyshev-Gauss-Lobatto nodes ``cos(pi j / N)``, from 1 down to -1."""
    if int(N) != N or N < 1:
        raise ValueError(f"degree must be >= 1, got {N}")
    x = np.cos(np.pi * np.arange(N + 1) / N)
    # exact symmetry: cos(pi/2) is not exactly zero in floating point
    x = 0.5 * (x - x[::-1])
    return x


def cheb_diff(N: int) -> np.ndarray:
    """First-derivative collocation matrix on the CGL nodes.

    Off-diagonal ``D[j, k] = (c_j / c_k) (-1)^(j+k) / (x_j - x_k)`` with
    ``c_0 = c_N = 2``; diagonal entries are negative row sums.
    """
    x = cgl_nodes(N)
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(N + 1)
    dX = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def cheb_diff2(D: np.ndarray) -> np.ndarray:
    return D @ D
