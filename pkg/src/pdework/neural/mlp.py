"""tanh multilayer perceptrons with value / gradient / pure-second-derivative jets."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..errors import NumericalError, StructuralError
from . import tape
from .tape import Var, value_of


@dataclass(frozen=True)
class MlpParams:
    """``weights[l]`` has shape ``(d_{l+1}, d_l)``; hidden layers use tanh."""

    weights: tuple
    biases: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "biases", tuple(self.biases))
        if len(self.weights) != len(self.biases) or not self.weights:
            raise StructuralError("need one bias per weight matrix and at least one layer")
        prev = None
        for W, b in zip(self.weights, self.biases):
            rows, cols = W.shape
            if b.shape != (rows,):
                raise StructuralError(f"bias shape {b.shape} does not match weight shape {W.shape}")
            if prev is not None and cols != prev:
                raise StructuralError(f"layer expects {cols} inputs but previous layer gives {prev}")
            prev = rows

    @property
    def layer_dims(self) -> tuple:
        return (self.weights[0].shape[1],) + tuple(W.shape[0] for W in self.weights)

    @property
    def n_params(self) -> int:
        return sum(value_of(W).size + value_of(b).size for W, b in zip(self.weights, self.biases))

    def leaves(self) -> list:
        out = []
        for W, b in zip(self.weights, self.biases):
            out += [W, b]
        return out

    @classmethod
    def from_leaves(cls, leaves) -> "MlpParams":
        leaves = list(leaves)
        return cls(tuple(leaves[0::2]), tuple(leaves[1::2]))


def init_mlp(layer_dims, scheme: str = "xavier", seed: int = 0) -> MlpParams:
    """Uniform Xavier (``Var = 2/(n_in+n_out)``) or He (``Var = 2/n_in``) weights, zero biases."""
    dims = [int(d) for d in layer_dims]
    if len(dims) < 2 or min(dims) < 1:
        raise ValueError(f"need at least input and output dimensions, got {layer_dims}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        if scheme == "xavier":
            limit = np.sqrt(6.0 / (n_in + n_out))
        elif scheme == "he":
            limit = np.sqrt(6.0 / n_in)
        else:
            raise ValueError(f"unknown initialisation scheme {scheme!r}")
        weights.append(rng.uniform(-limit, limit, size=(n_out, n_in)))
        biases.append(np.zeros(n_out))
    return MlpParams(tuple(weights), tuple(biases))


def _check_input(params: MlpParams, x):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.ndim != 2 or X.shape[1] != params.layer_dims[0]:
        raise StructuralError(f"input shape {np.shape(x)} does not match input dimension {params.layer_dims[0]}")
    return X, single


def forward(params: MlpParams, x):
    """Network output.  ``x`` of shape ``(d,)`` gives a scalar, ``(n, d)`` gives ``(n,)``."""
    X, single = _check_input(params, x)
    a = X
    last = len(params.weights) - 1
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W.T + b
        a = z if l == last else tape.tanh(z)
    out = a.reshape(-1) if isinstance(a, Var) else a[:, 0].copy()
    if single:
        return out[0] if isinstance(out, Var) else float(out[0])
    return out


class Jet2(NamedTuple):
    """Value, input gradient ``(n, d)`` and pure second derivatives ``(n, d)``."""

    value: object
    grad: object
    lap_parts: object

    @property
    def laplacian(self):
        return tape.sum_(self.lap_parts, axis=1)


def forward_jet(params: MlpParams, x) -> Jet2:
    """Second-order forward-mode propagation through the network.

    Derivative channels are stacked as ``(d, n, width)`` arrays; only the
    pure second derivatives d^2/dx_k^2 are carried.  Works on plain arrays
    and on tape variables alike.
    """
    X, single = _check_input(params, x)
    n, d = X.shape
    a = X
    da = d2a = None
    last = len(params.weights) - 1
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W.T + b
        width = value_of(W).shape[0]
        if l == 0:
            dz = tape.mul(W.T.reshape(d, 1, width), np.ones((1, n, 1)))
            d2z = None
        else:
            dz = da @ W.T
            d2z = d2a @ W.T
        if l == last:
            a, da, d2a = z, dz, d2z
            break
        a = tape.tanh(z)
        s = 1.0 - a * a  # tanh'
        s3 = s.reshape(1, n, width)
        da = s3 * dz
        curv = (-2.0 * a * s).reshape(1, n, width)  # tanh''
        d2a = curv * (dz * dz)
        if d2z is not None:
            d2a = d2a + s3 * d2z

    value = a.reshape(-1) if isinstance(a, Var) else a[:, 0].copy()
    grad = da.reshape(d, n).T
    if d2a is None:
        lap = np.zeros((n, d))
    else:
        lap = d2a.reshape(d, n).T
    if single:
        return Jet2(value[0] if isinstance(value, Var) else float(value[0]), grad[0], lap[0])
    return Jet2(value, grad, lap)


# -- parameter trees -------------------------------------------------------
#
# A parameter tree is an MlpParams, an array/float leaf, or a dict mapping
# names to trees.  Dict keys are visited in sorted order.


def tree_leaves(tree) -> list:
    if isinstance(tree, MlpParams):
        return tree.leaves()
    if isinstance(tree, dict):
        out = []
        for key in sorted(tree):
            out += tree_leaves(tree[key])
        return out
    return [tree]


def tree_unflatten(tree, leaves):
    it = iter(leaves)

    def build(node):
        if isinstance(node, MlpParams):
            return MlpParams.from_leaves(next(it) for _ in range(len(node.leaves())))
        if isinstance(node, dict):
            return {key: build(node[key]) for key in sorted(node)}
        return next(it)

    return build(tree)


def tree_map(fn, *trees):
    flat = [tree_leaves(t) for t in trees]
    return tree_unflatten(trees[0], [fn(*xs) for xs in zip(*flat)])


def loss_param_grad(loss, params):
    """Value and gradient of ``loss(params)`` with respect to every leaf of ``params``.

    ``loss`` receives a copy of the tree whose leaves are tape variables and
    must return a scalar built from supported primitives.
    """
    leaves = [np.asarray(x, dtype=float) for x in tree_leaves(params)]
    variables = [Var(x) for x in leaves]
    out = loss(tree_unflatten(params, variables))
    if not isinstance(out, Var):
        value = float(np.asarray(out))
        grads = [np.zeros_like(x) for x in leaves]
    else:
        value = float(out.value)
        if not np.isfinite(value):
            raise NumericalError(f"loss evaluated to {value}")
        out.backward()
        grads = [np.zeros_like(x) if v.grad is None else v.grad.reshape(x.shape) for v, x in zip(variables, leaves)]
    if not np.isfinite(value):
        raise NumericalError(f"loss evaluated to {value}")
    return value, tree_unflatten(params, grads)


# -- checkpoints -----------------------------------------------------------


def save_mlp(params: MlpParams, path) -> None:
    """Write a text checkpoint.

    Line 1 holds the layer dimensions separated by spaces.  Then, layer by
    layer, every weight (row-major) and every bias follows, one value per
    line, written with ``repr`` so values round-trip exactly.
    """
    lines = [" ".join(str(d) for d in params.layer_dims)]
    for W, b in zip(params.weights, params.biases):
        lines += [repr(float(v)) for v in np.asarray(W).ravel()]
        lines += [repr(float(v)) for v in np.asarray(b).ravel()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_mlp(path) -> MlpParams:
    text = Path(path).read_text().splitlines()
    if not text:
        raise StructuralError(f"empty checkpoint {path}")
    dims = [int(t) for t in text[0].split()]
    values = np.array([float(t) for t in text[1:] if t.strip()])
    expected = sum(n_in * n_out + n_out for n_in, n_out in zip(dims[:-1], dims[1:]))
    if len(dims) < 2 or expected != len(values):
        raise StructuralError(f"checkpoint {path} holds {len(values)} values, dims {dims} imply {expected}")
    weights, biases, pos = [], [], 0
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        weights.append(values[pos:pos + n_in * n_out].reshape(n_out, n_in))
        pos += n_in * n_out
        biases.append(values[pos:pos + n_out].copy())
        pos += n_out
    return MlpParams(tuple(weights), tuple(biases))
