from .adam import AdamState, adam_init, adam_step
from .mlp import (
    Jet2,
    MlpParams,
    forward,
    forward_jet,
    init_mlp,
    load_mlp,
    loss_param_grad,
    save_mlp,
    tree_leaves,
    tree_map,
    tree_unflatten,
)
from .tape import Var

__all__ = [
    "AdamState",
    "Jet2",
    "MlpParams",
    "Var",
    "adam_init",
    "adam_step",
    "forward",
    "forward_jet",
    "init_mlp",
    "load_mlp",
    "loss_param_grad",
    "save_mlp",
    "tree_leaves",
    "tree_map",
    "tree_unflatten",
]
