"""Collocation, boundary and initial point sets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from .problems import Box, Burgers1D, HeatInverseKappa, Observations


def _check(box: Box, n: int):
    if int(n) != n or n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    if box.is_degenerate():
        raise ValueError(f"degenerate sampling region {box}")


def sample_uniform(box: Box, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. uniform points in ``box``, shape ``(n, dim)``."""
    _check(box, n)
    rng = np.random.default_rng(seed)
    lo, hi = np.array(box.lo), np.array(box.hi)
    return lo + (hi - lo) * rng.random((int(n), box.dim))


def sample_lhs(box: Box, n: int, seed: int) -> np.ndarray:
    """Latin hypercube sample: each axis gets exactly one point per stratum."""
    _check(box, n)
    n = int(n)
    rng = np.random.default_rng(seed)
    u = np.empty((n, box.dim))
    for k in range(box.dim):
        u[:, k] = (rng.permutation(n) + rng.random(n)) / n
    lo, hi = np.array(box.lo), np.array(box.hi)
    return lo + (hi - lo) * u


SAMPLERS = {"uniform": sample_uniform, "lhs": sample_lhs}


def sample_box_boundary(box: Box, n: int, seed: int, method: str = "uniform") -> np.ndarray:
    """Points on the perimeter of a 2D box, distributed by arc length."""
    if box.dim != 2:
        raise ValueError("perimeter sampling needs a 2D box")
    (x0, y0), (x1, y1) = box.lo, box.hi
    wx, wy = x1 - x0, y1 - y0
    s = SAMPLERS[method](Box((0.0,), (2 * (wx + wy),)), n, seed)[:, 0]
    pts = np.empty((len(s), 2))
    edges = np.cumsum([wx, wy, wx])
    bottom = s < edges[0]
    right = (s >= edges[0]) & (s < edges[1])
    top = (s >= edges[1]) & (s < edges[2])
    left = s >= edges[2]
    pts[bottom] = np.column_stack([x0 + s[bottom], np.full(bottom.sum(), y0)])
    pts[right] = np.column_stack([np.full(right.sum(), x1), y0 + s[right] - edges[0]])
    pts[top] = np.column_stack([x1 - (s[top] - edges[1]), np.full(top.sum(), y1)])
    pts[left] = np.column_stack([np.full(left.sum(), x0), y1 - (s[left] - edges[2])])
    return pts


@dataclass(frozen=True)
class SampleConfig:
    n_interior: int = 2000
    n_boundary: int = 400
    n_initial: int = 0
    method: str = "uniform"

    def __post_init__(self):
        if self.method not in SAMPLERS:
            raise ConfigurationError(f"unknown sampling method {self.method!r}")


@dataclass(frozen=True)
class SampleSet:
    interior: np.ndarray
    boundary: np.ndarray
    initial: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    data: Observations | None = None

    @property
    def counts(self) -> tuple:
        n_d = 0 if self.data is None else len(self.data)
        return len(self.interior), len(self.boundary), len(self.initial), n_d


def build_samples(problem, config: SampleConfig, seed: int) -> SampleSet:
    """Draw the point sets a problem needs; seeds for each set are derived from ``seed``."""
    sampler = SAMPLERS[config.method]
    seeds = np.random.SeedSequence(seed).generate_state(3)
    interior = sampler(problem.interior, config.n_interior, int(seeds[0]))
    data = getattr(problem, "observations", None)

    if isinstance(problem, (Burgers1D, HeatInverseKappa)):
        box = problem.interior
        (xl, _), (xr, T) = box.lo, box.hi
        if config.n_boundary < 2 or config.n_initial < 1:
            raise ConfigurationError("space-time problems need boundary (>= 2) and initial points")
        t = sampler(Box((0.0,), (T,)), config.n_boundary, int(seeds[1]))[:, 0]
        side = np.where(np.arange(len(t)) % 2 == 0, xl, xr)
        boundary = np.column_stack([side, t])
        x = sampler(Box((xl,), (xr,)), config.n_initial, int(seeds[2]))[:, 0]
        initial = np.column_stack([x, np.zeros_like(x)])
        return SampleSet(interior, boundary, initial, data)

    boundary = sample_box_boundary(problem.interior, config.n_boundary, int(seeds[1]), config.method)
    return SampleSet(interior, boundary, np.zeros((0, 2)), data)
