"""PDE task descriptions for physics-informed training.

Space-time problems take inputs ordered ``(x, t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import ConfigurationError


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi):
            raise ValueError("lower and upper corners differ in dimension")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def is_degenerate(self) -> bool:
        return any(h <= l for l, h in zip(self.lo, self.hi))

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        p = np.atleast_2d(points)
        lo, hi = np.array(self.lo), np.array(self.hi)
        return np.all((p >= lo - tol) & (p <= hi + tol), axis=1)


UNIT_SQUARE = Box((0.0, 0.0), (1.0, 1.0))


@dataclass(frozen=True)
class Observations:
    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, float))
        v = np.asarray(self.values, float).reshape(-1)
        if len(p) != len(v):
            raise ConfigurationError(f"{len(p)} observation points but {len(v)} values")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class PoissonForward2D:
    """``-lap(u) = f`` on the unit square, ``u = g`` on the boundary."""

    f: Callable
    g: Callable
    domain: Box = UNIT_SQUARE
    observations: Optional[Observations] = None

    @property
    def interior(self) -> Box:
        return self.domain


@dataclass(frozen=True)
class Burgers1D:
    """``u_t + u u_x = nu u_xx`` on ``[-L, L] x [0, T]``."""

    nu: float
    u0: Callable
    bc_left: Callable
    bc_right: Callable
    T: float
    L: float = 1.0

    def __post_init__(self):
        if not (self.T > 0 and self.nu > 0 and self.L > 0):
            raise ConfigurationError("Burgers problem needs T > 0, nu > 0, L > 0")

    @property
    def interior(self) -> Box:
        return Box((-self.L, 0.0), (self.L, self.T))


@dataclass(frozen=True)
class HeatInverseKappa:
    """``u_t = kappa u_xx`` on ``[0, L] x [0, T]`` with unknown ``kappa``."""

    h0: Callable
    g1: Callable
    g2: Callable
    observations: Observations
    T: float
    L: float = 1.0

    def __post_init__(self):
        if not self.T > 0:
            raise ConfigurationError("heat problem needs T > 0")
        if self.observations is None or len(self.observations) < 1:
            raise ConfigurationError("inverse problem needs at least one observation")

    @property
    def interior(self) -> Box:
        return Box((0.0, 0.0), (self.L, self.T))


@dataclass(frozen=True)
class SourceInverse2D:
    """``-lap(u) = f`` with unknown ``f``, ``u = g`` on the unit-square boundary."""

    g: Callable
    observations: Observations
    domain: Box = UNIT_SQUARE

    def __post_init__(self):
        if self.observations is None or len(self.observations) < 1:
            raise ConfigurationError("inverse problem needs at least one observation")

    @property
    def interior(self) -> Box:
        return self.domain
