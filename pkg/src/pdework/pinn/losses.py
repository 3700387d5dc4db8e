"""PDE residuals and the weighted composite PINN loss."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from ..errors import ConfigurationError
from ..neural import tape
from ..neural.mlp import Jet2, MlpParams, forward, forward_jet
from .problems import Burgers1D, HeatInverseKappa, PoissonForward2D, SourceInverse2D
from .sampling import SampleSet

BALANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class AnalyticField:
    """Closed-form field exposing the same value/jet interface as a network."""

    value: Callable
    grad: Callable
    lap_parts: Callable

    def __call__(self, points):
        return np.asarray(self.value(np.atleast_2d(points)), float)

    def jet(self, points) -> Jet2:
        p = np.atleast_2d(points)
        return Jet2(self(p), np.asarray(self.grad(p), float), np.asarray(self.lap_parts(p), float))


def net_value(net, points):
    if isinstance(net, MlpParams):
        return forward(net, np.atleast_2d(points))
    return net(points)


def net_jet(net, points) -> Jet2:
    if isinstance(net, MlpParams):
        return forward_jet(net, np.atleast_2d(points))
    return net.jet(points)


def _eval(fn, points):
    p = np.atleast_2d(points)
    return np.broadcast_to(np.asarray(fn(*p.T), float), (len(p),))


def residual_poisson(net, points, f) -> np.ndarray:
    """``-(u_xx + u_yy) - f`` at each point; ``f`` may be a callable ``f(x, y)`` or values."""
    jet = net_jet(net, points)
    fv = _eval(f, points) if callable(f) else f
    return -jet.laplacian - fv


def residual_burgers(net, points, nu: float):
    """``u_t + u u_x - nu u_xx`` with inputs ordered ``(x, t)``."""
    jet = net_jet(net, points)
    u = jet.value
    ux = jet.grad[:, 0]
    ut = jet.grad[:, 1]
    uxx = jet.lap_parts[:, 0]
    return ut + u * ux - nu * uxx


def residual_heat_kappa(net, kappa, points):
    """``u_t - kappa u_xx`` with inputs ordered ``(x, t)``."""
    jet = net_jet(net, points)
    return jet.grad[:, 1] - kappa * jet.lap_parts[:, 0]


class LossComponents(NamedTuple):
    Lf: object
    Lb: object
    Li: object
    Ld: object
    counts: tuple = (0, 0, 0, 0)

    def values(self) -> tuple:
        return tuple(float(tape.value_of(c)) for c in (self.Lf, self.Lb, self.Li, self.Ld))


@dataclass(frozen=True)
class LossWeights:
    lambda_f: float = 1.0
    lambda_b: float = 1.0
    lambda_i: float = 1.0
    lambda_d: float = 1.0

    def __post_init__(self):
        ws = (self.lambda_f, self.lambda_b, self.lambda_i, self.lambda_d)
        if any(not np.isfinite(w) or w < 0 for w in ws):
            raise ConfigurationError(f"loss weights must be finite and nonnegative, got {ws}")
        if not self.lambda_f > 0:
            raise ConfigurationError("lambda_f must be positive")

    def as_tuple(self) -> tuple:
        return (self.lambda_f, self.lambda_b, self.lambda_i, self.lambda_d)


def _mse(r):
    return tape.mean(r * r)


def kappa_of(nets):
    if "kappa" in nets:
        return nets["kappa"]
    return tape.softplus(nets["kappa_raw"])


def loss_components(problem, nets: dict, samples: SampleSet) -> LossComponents:
    """Mean-squared residual, boundary, initial and data losses.

    ``nets`` maps ``"u"`` to the solution network, plus ``"f"`` (source
    network) or ``"kappa_raw"``/``"kappa"`` for the inverse problems.
    Components a problem does not use are 0 with count 0.
    """
    u = nets["u"]
    n_f, n_b, n_i, n_d = samples.counts
    if n_f == 0:
        raise ConfigurationError("no interior collocation points")
    zero = 0.0

    if isinstance(problem, PoissonForward2D):
        Lf = _mse(residual_poisson(u, samples.interior, problem.f))
    elif isinstance(problem, SourceInverse2D):
        Lf = _mse(residual_poisson(u, samples.interior, net_value(nets["f"], samples.interior)))
    elif isinstance(problem, Burgers1D):
        Lf = _mse(residual_burgers(u, samples.interior, problem.nu))
    elif isinstance(problem, HeatInverseKappa):
        Lf = _mse(residual_heat_kappa(u, kappa_of(nets), samples.interior))
    else:
        raise ConfigurationError(f"unsupported problem type {type(problem).__name__}")

    if n_b == 0:
        raise ConfigurationError("no boundary points")
    bp = samples.boundary
    if isinstance(problem, (PoissonForward2D, SourceInverse2D)):
        target = _eval(problem.g, bp)
    elif isinstance(problem, Burgers1D):
        left = bp[:, 0] < 0.5 * (problem.interior.lo[0] + problem.interior.hi[0])
        target = np.where(left, _eval(lambda x, t: problem.bc_left(t), bp), _eval(lambda x, t: problem.bc_right(t), bp))
    else:
        left = bp[:, 0] < 0.5 * problem.L
        target = np.where(left, _eval(lambda x, t: problem.g1(t), bp), _eval(lambda x, t: problem.g2(t), bp))
    Lb = _mse(net_value(u, bp) - target)

    Li = zero
    if isinstance(problem, (Burgers1D, HeatInverseKappa)):
        if n_i == 0:
            raise ConfigurationError("time-dependent problem without initial points")
        h = problem.u0 if isinstance(problem, Burgers1D) else problem.h0
        Li = _mse(net_value(u, samples.initial) - _eval(lambda x, t: h(x), samples.initial))
    else:
        n_i = 0

    Ld = zero
    if samples.data is not None and n_d > 0:
        Ld = _mse(net_value(u, samples.data.points) - samples.data.values)
    else:
        n_d = 0
    return LossComponents(Lf, Lb, Li, Ld, (n_f, n_b, n_i, n_d))


def total_loss(components, weights: LossWeights):
    total = 0.0
    for w, c in zip(weights.as_tuple(), components[:4]):
        if w != 0.0:
            total = total + w * c
    return total


def balance_weights(components) -> LossWeights:
    """Weights inversely proportional to each component, normalised so ``lambda_f = 1``.

    Components are clamped below at ``1e-12``; all-zero input gives unit weights.
    """
    vals = np.array([float(tape.value_of(c)) for c in components[:4]])
    if np.all(vals == 0.0):
        return LossWeights()
    clamped = np.maximum(vals, BALANCE_FLOOR)
    w = clamped[0] / clamped
    return LossWeights(*w)
