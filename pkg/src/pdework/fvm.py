"""Node-centred finite volumes for ``d/dx(a u - nu du/dx) = f`` with upwinding.

Control volumes are the dual cells ``[x_{i-1/2}, x_{i+1/2}]`` around each
interior node, so the source weight is ``(dx_{i-1} + dx_i) / 2``.  The
convective flux at an interface takes the upstream node value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .discretize import Interval1D
from .linalg import Tridiagonal, thomas_solve


@dataclass(frozen=True)
class ConvDiffConfig:
    grid: Interval1D
    a: float
    nu: float
    f: Callable = lambda x: np.zeros_like(x)
    u_left: float = 0.0
    u_right: float = 1.0

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"diffusion coefficient must be positive, got {self.nu}")


def upwind_coefficients(a: float, nu: float, dx_left: float, dx_right: float):
    """``(sub, diag, super)`` for one interior row; the row sums to zero."""
    if not (dx_left > 0 and dx_right > 0):
        raise ValueError(f"cell widths must be positive, got {dx_left}, {dx_right}")
    if not nu > 0:
        raise ValueError(f"diffusion coefficient must be positive, got {nu}")
    sub = -(nu / dx_left + max(a, 0.0))
    sup = -(nu / dx_right + max(-a, 0.0))
    return sub, -(sub + sup), sup


def assemble_fvm(config: ConvDiffConfig) -> tuple[Tridiagonal, np.ndarray]:
    x = config.grid.nodes
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 nodes (one interior control volume)")
    dx = np.diff(x)
    a, nu = config.a, config.nu

    dl, dr = dx[:-1], dx[1:]
    sub_i = -(nu / dl + max(a, 0.0))
    sup_i = -(nu / dr + max(-a, 0.0))
    diag_i = -(sub_i + sup_i)

    sub = np.concatenate([sub_i, [0.0]])
    diag = np.concatenate([[1.0], diag_i, [1.0]])
    sup = np.concatenate([[0.0], sup_i])

    b = np.empty(n)
    b[1:-1] = np.broadcast_to(np.asarray(config.f(x[1:-1]), float), n - 2) * (dl + dr) / 2
    b[0], b[-1] = config.u_left, config.u_right
    return Tridiagonal(sub, diag, sup), b


def solve_fvm_convdiff(config: ConvDiffConfig) -> np.ndarray:
    T, b = assemble_fvm(config)
    u = thomas_solve(T, b)
    u[0], u[-1] = config.u_left, config.u_right
    return u


def interface_fluxes(config: ConvDiffConfig, u) -> np.ndarray:
    """Discrete total flux ``a*u_upwind - nu*du/dx`` on each of the N cell faces."""
    u = np.asarray(u, float)
    dx = config.grid.widths
    a = config.a
    upwind = u[:-1] if a >= 0 else u[1:]
    return a * upwind - config.nu * np.diff(u) / dx


def conservation_defect(config: ConvDiffConfig, u) -> float:
    """``(F_right - F_left) - sum(b_interior)`` over the interior volumes."""
    F = interface_fluxes(config, u)
    _, b = assemble_fvm(config)
    return float((F[-1] - F[0]) - b[1:-1].sum())


def boundary_layer_exact(x, a: float, nu: float):
    """Exact solution of ``a u' = nu u''`` with ``u(0) = 0``, ``u(1) = 1``."""
    x = np.asarray(x, float)
    r = a / nu
    if r > 0:
        return (np.exp(r * (x - 1)) - np.exp(-r)) / (-np.expm1(-r))
    if r < 0:
        return np.expm1(r * x) / np.expm1(r)
    return x
