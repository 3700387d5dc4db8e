"""Adam training loop for the PINN problems."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConfigurationError, NumericalError
from ..neural.adam import adam_init, adam_step
from ..neural.mlp import MlpParams, forward, init_mlp, loss_param_grad, tree_leaves
from .losses import LossWeights, balance_weights, loss_components, total_loss
from .problems import HeatInverseKappa, SourceInverse2D
from .sampling import SampleConfig, build_samples

KAPPA_INIT = 1.0


def softplus(x: float) -> float:
    return float(np.logaddexp(0.0, x))


def softplus_inverse(y: float) -> float:
    return float(math.log(math.expm1(y)))


@dataclass(frozen=True)
class NetSpec:
    layer_dims: tuple = (2, 50, 50, 50, 50, 1)
    scheme: str = "xavier"
    source_dims: Optional[tuple] = None  # second network for source recovery


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and schedule settings.

    The learning rate decays as ``alpha * lr_decay ** (step / decay_steps)``;
    ``lr_decay = 1`` keeps it constant.  With ``weight_strategy = "balance"``
    the loss weights are recomputed from the current components every
    ``balance_every`` steps (falls back to ``resample_every``, then to every step).
    """

    steps: int = 1000
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0
    resample_every: int = 0
    weight_strategy: str = "fixed"
    weights: LossWeights = field(default_factory=LossWeights)
    balance_every: int = 0
    lr_decay: float = 1.0
    decay_steps: int = 1000

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ConfigurationError(f"steps must be a positive integer, got {self.steps}")
        if self.weight_strategy not in ("fixed", "balance"):
            raise ConfigurationError(f"unknown weight strategy {self.weight_strategy!r}")
        if self.resample_every < 0 or self.balance_every < 0:
            raise ConfigurationError("resample_every and balance_every must be >= 0")
        if not (self.alpha > 0 and 0 < self.lr_decay <= 1 and self.decay_steps > 0):
            raise ConfigurationError("invalid learning-rate schedule")

    def lr(self, step: int) -> float:
        return self.alpha * self.lr_decay ** (step / self.decay_steps)


class HistoryRow(tuple):
    """``(Lf, Lb, Li, Ld, total, kappa)``; kappa is ``None`` when not trained."""

    __slots__ = ()

    def __new__(cls, Lf, Lb, Li, Ld, total, kappa=None):
        return super().__new__(cls, (Lf, Lb, Li, Ld, total, kappa))

    Lf = property(lambda s: s[0])
    Lb = property(lambda s: s[1])
    Li = property(lambda s: s[2])
    Ld = property(lambda s: s[3])
    total = property(lambda s: s[4])
    kappa = property(lambda s: s[5])


@dataclass(frozen=True)
class TrainedModel:
    params: MlpParams
    history: tuple
    kappa_hat: Optional[float] = None
    source_params: Optional[MlpParams] = None

    def predict(self, points) -> np.ndarray:
        return forward(self.params, np.atleast_2d(points))

    def predict_source(self, points) -> np.ndarray:
        if self.source_params is None:
            raise ConfigurationError("model has no source network")
        return forward(self.source_params, np.atleast_2d(points))


class TrainingDiverged(NumericalError):
    """Raised on a non-finite loss; carries the step and last finite state."""

    def __init__(self, step: int, last_params, history):
        super().__init__(f"non-finite loss at step {step}")
        self.step = step
        self.last_params = last_params
        self.history = history


def initial_tree(problem, net_spec: NetSpec, seed: int) -> dict:
    seeds = np.random.SeedSequence(seed).generate_state(2)
    tree = {"u": init_mlp(net_spec.layer_dims, net_spec.scheme, int(seeds[0]))}
    if isinstance(problem, HeatInverseKappa):
        tree["kappa_raw"] = np.array(softplus_inverse(KAPPA_INIT))
    if isinstance(problem, SourceInverse2D):
        dims = net_spec.source_dims or net_spec.layer_dims
        tree["f"] = init_mlp(dims, net_spec.scheme, int(seeds[1]))
    return tree


def train(problem, net_spec: NetSpec, train_config: TrainConfig, sample_config: SampleConfig) -> TrainedModel:
    """Minimise the weighted composite loss with Adam, full batch."""
    cfg = train_config
    tree = initial_tree(problem, net_spec, cfg.seed)
    state = adam_init(tree, cfg.alpha, cfg.beta1, cfg.beta2, cfg.epsilon)
    sample_seeds = np.random.SeedSequence([cfg.seed, 1])
    samples = build_samples(problem, sample_config, int(sample_seeds.generate_state(1)[0]))
    weights = cfg.weights
    balance_every = cfg.balance_every or cfg.resample_every or 1
    history = []

    for step in range(cfg.steps):
        if cfg.resample_every and step and step % cfg.resample_every == 0:
            seed_k = int(np.random.SeedSequence([cfg.seed, 1, step]).generate_state(1)[0])
            samples = build_samples(problem, sample_config, seed_k)

        parts = {}

        def objective(t, samples=samples):
            comps = loss_components(problem, t, samples)
            parts["c"] = comps
            return total_loss(comps, parts.get("w", weights))

        if cfg.weight_strategy == "balance" and step % balance_every == 0:
            # weights come from the components at the current parameters
            comps = loss_components(problem, tree, samples)
            if not np.all(np.isfinite(comps.values())):
                raise TrainingDiverged(step, tree, tuple(history))
            weights = balance_weights(comps)
        parts["w"] = weights

        try:
            value, grads = loss_param_grad(objective, tree)
        except NumericalError:
            raise TrainingDiverged(step, tree, tuple(history)) from None
        kappa = softplus(float(tree["kappa_raw"])) if "kappa_raw" in tree else None
        history.append(HistoryRow(*parts["c"].values(), value, kappa))
        new_tree, state = adam_step(state, tree, grads, cfg.lr(step))
        if not all(np.all(np.isfinite(np.asarray(x))) for x in tree_leaves(new_tree)):
            raise TrainingDiverged(step, tree, tuple(history))
        tree = new_tree

    kappa_hat = softplus(float(tree["kappa_raw"])) if "kappa_raw" in tree else None
    return TrainedModel(tree["u"], tuple(history), kappa_hat, tree.get("f"))


def write_history(history, path) -> None:
    """CSV with columns ``step,Lf,Lb,Li,Ld,total,kappa``; kappa empty when absent."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "Lf", "Lb", "Li", "Ld", "total", "kappa"])
        for k, row in enumerate(history):
            vals = [repr(float(v)) for v in row[:5]]
            w.writerow([k, *vals, "" if row[5] is None else repr(float(row[5]))])
