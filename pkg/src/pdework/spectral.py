"""Chebyshev collocation for ``u'' = f`` on [-1, 1] with Dirichlet data.

Note the sign: this module solves ``u'' = f``, not ``-u'' = f``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretize import cgl_nodes, cheb_diff, cheb_diff2
from .linalg import lu_solve


@dataclass(frozen=True)
class SpectralSolution:
    N: int
    nodes: np.ndarray  # descending, nodes[0] = 1
    nodal_values: np.ndarray  # nodal_values[0] = u(1), nodal_values[N] = u(-1)

    def __call__(self, x):
        return eval_interpolant(self, x)


def solve_spectral_poisson(N: int, f, a: float, b: float) -> SpectralSolution:
    """Collocate ``u'' = f`` at the interior CGL nodes; ``u(-1) = a``, ``u(1) = b``."""
    if N < 2:
        raise ValueError(f"need N >= 2 for an interior node, got {N}")
    x = cgl_nodes(N)
    D2 = cheb_diff2(cheb_diff(N))
    # column 0 is the node x = 1 (value b), column N is x = -1 (value a)
    A = D2[1:N, 1:N]
    rhs = np.broadcast_to(np.asarray(f(x[1:N]), float), (N - 1,)) - D2[1:N, 0] * b - D2[1:N, N] * a
    u = np.empty(N + 1)
    u[1:N] = lu_solve(A, rhs)
    u[0], u[N] = b, a
    return SpectralSolution(N, x, u)


def barycentric_weights(N: int) -> np.ndarray:
    w = (-1.0) ** np.arange(N + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def eval_interpolant(sol: SpectralSolution, x):
    """Barycentric evaluation of the degree-N interpolant at ``x`` in [-1, 1]."""
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if np.any((xs < -1.0) | (xs > 1.0)):
        raise ValueError("evaluation points must lie in [-1, 1]")
    nodes, vals = sol.nodes, sol.nodal_values
    w = barycentric_weights(sol.N)

    diff = xs[:, None] - nodes[None, :]
    exact = diff == 0.0
    hit = exact.any(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = w / diff
        out = (c @ vals) / c.sum(axis=1)
    if hit.any():
        out[hit] = vals[np.argmax(exact[hit], axis=1)]
    return float(out[0]) if scalar else out
