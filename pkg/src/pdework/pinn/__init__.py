from .losses import (
    AnalyticField,
    LossComponents,
    LossWeights,
    balance_weights,
    loss_components,
    residual_burgers,
    residual_heat_kappa,
    residual_poisson,
    total_loss,
)
from .problems import Box, Burgers1D, HeatInverseKappa, Observations, PoissonForward2D, SourceInverse2D
from .sampling import SampleConfig, SampleSet, build_samples, sample_lhs, sample_uniform
from .train import NetSpec, TrainConfig, TrainedModel, TrainingDiverged, train, write_history

__all__ = [
    "AnalyticField",
    "Box",
    "Burgers1D",
    "HeatInverseKappa",
    "LossComponents",
    "LossWeights",
    "NetSpec",
    "Observations",
    "PoissonForward2D",
    "SampleConfig",
    "SampleSet",
    "SourceInverse2D",
    "TrainConfig",
    "TrainedModel",
    "TrainingDiverged",
    "balance_weights",
    "build_samples",
    "loss_components",
    "residual_burgers",
    "residual_heat_kappa",
    "residual_poisson",
    "sample_lhs",
    "sample_uniform",
    "total_loss",
    "train",
    "write_history",
]
