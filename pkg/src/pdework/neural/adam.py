"""Adam with bias correction, operating on parameter trees."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import StructuralError
from .mlp import tree_leaves, tree_unflatten


@dataclass(frozen=True)
class AdamState:
    m: tuple
    v: tuple
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    alpha: float = 1e-3
    epsilon: float = 1e-8


def adam_init(params, alpha=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8) -> AdamState:
    zeros = tuple(np.zeros_like(np.asarray(x, float)) for x in tree_leaves(params))
    return AdamState(zeros, tuple(np.zeros_like(z) for z in zeros), 0, beta1, beta2, alpha, epsilon)


def adam_step(state: AdamState, params, grads, alpha: float | None = None):
    """One Adam update; returns ``(new_params, new_state)`` without mutating inputs.

    ``alpha`` overrides the state's learning rate for this step only (used
    by learning-rate schedules).
    """
    p_leaves = tree_leaves(params)
    g_leaves = tree_leaves(grads)
    if len(p_leaves) != len(g_leaves) or len(p_leaves) != len(state.m):
        raise StructuralError("parameter, gradient and optimizer state trees differ in size")
    lr = state.alpha if alpha is None else alpha
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    t = state.t + 1
    bc1 = 1.0 - b1 ** t
    bc2 = 1.0 - b2 ** t

    new_p, new_m, new_v = [], [], []
    for p, g, m, v in zip(p_leaves, g_leaves, state.m, state.v):
        p = np.asarray(p, float)
        g = np.asarray(g, float)
        if g.shape != p.shape:
            raise StructuralError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        m_hat = m / bc1
        v_hat = v / bc2
        new_p.append(p - lr * m_hat / (np.sqrt(v_hat) + eps))
        new_m.append(m)
        new_v.append(v)
    return tree_unflatten(params, new_p), replace(state, m=tuple(new_m), v=tuple(new_v), t=t)
