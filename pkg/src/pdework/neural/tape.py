"""A small reverse-mode autodiff tape over numpy arrays.

Only the primitives needed by network evaluations and PINN losses are
supported: broadcasting arithmetic, matmul with a 2D right operand,
transpose, tanh, softplus, reductions and basic indexing.  Every op records
its parents together with a vector-Jacobian product closure.
"""

from __future__ import annotations

import numpy as np


class Var:
    __slots__ = ("value", "parents", "grad")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, value, parents=()):
        self.value = np.asarray(value, dtype=float)
        self.parents = parents  # tuple of (Var, vjp)
        self.grad = None

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self):
        return self.value.ndim

    @property
    def T(self):
        return Var(self.value.T, ((self, lambda g: g.T),))

    def __repr__(self):
        return f"Var(shape={self.shape})"

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(other))

    def __rsub__(self, other):
        return add(other, neg(self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Var):
            raise TypeError("division by a Var is not supported")
        return mul(self, 1.0 / np.asarray(other, float))

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __getitem__(self, idx):
        return getitem(self, idx)

    def __pow__(self, p):
        if p != 2:
            raise ValueError("only squaring is supported")
        return mul(self, self)

    def reshape(self, *shape):
        orig = self.shape
        return Var(self.value.reshape(*shape), ((self, lambda g: g.reshape(orig)),))

    def sum(self, axis=None):
        return sum_(self, axis)

    def mean(self, axis=None):
        return mean(self, axis)

    def backward(self):
        """Accumulate d(self)/d(leaf) into ``leaf.grad`` for every ancestor."""
        if self.value.size != 1:
            raise ValueError("backward() needs a scalar output")
        order, seen = [], set()
        stack = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent, _ in node.parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        for node in order:
            node.grad = None
        self.grad = np.ones_like(self.value)
        for node in reversed(order):
            if node.grad is None:
                continue
            for parent, vjp in node.parents:
                contrib = vjp(node.grad)
                parent.grad = contrib if parent.grad is None else parent.grad + contrib


def value_of(x):
    return x.value if isinstance(x, Var) else np.asarray(x, float)


def _unbroadcast(g, shape):
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def add(a, b):
    av, bv = value_of(a), value_of(b)
    out = av + bv
    parents = []
    if isinstance(a, Var):
        parents.append((a, lambda g, s=av.shape: _unbroadcast(g, s)))
    if isinstance(b, Var):
        parents.append((b, lambda g, s=bv.shape: _unbroadcast(g, s)))
    return Var(out, tuple(parents)) if parents else out


def neg(a):
    if not isinstance(a, Var):
        return -np.asarray(a, float)
    return Var(-a.value, ((a, lambda g: -g),))


def mul(a, b):
    av, bv = value_of(a), value_of(b)
    out = av * bv
    parents = []
    if isinstance(a, Var):
        parents.append((a, lambda g, s=av.shape: _unbroadcast(g * bv, s)))
    if isinstance(b, Var):
        parents.append((b, lambda g, s=bv.shape: _unbroadcast(g * av, s)))
    return Var(out, tuple(parents)) if parents else out


def matmul(a, b):
    """``a @ b`` with ``b`` two-dimensional and ``a`` of any rank >= 1."""
    av, bv = value_of(a), value_of(b)
    if bv.ndim != 2:
        raise ValueError("right operand of matmul must be 2D")
    out = av @ bv
    parents = []
    if isinstance(a, Var):
        parents.append((a, lambda g: g @ bv.T))
    if isinstance(b, Var):
        def vjp_b(g):
            k = av.shape[-1]
            return av.reshape(-1, k).T @ g.reshape(-1, bv.shape[1])
        parents.append((b, vjp_b))
    return Var(out, tuple(parents)) if parents else out


def tanh(a):
    t = np.tanh(value_of(a))
    if not isinstance(a, Var):
        return t
    return Var(t, ((a, lambda g: g * (1.0 - t * t)),))


def softplus(a):
    v = value_of(a)
    out = np.logaddexp(0.0, v)
    if not isinstance(a, Var):
        return out
    sig = 0.5 * (1.0 + np.tanh(0.5 * v))
    return Var(out, ((a, lambda g: g * sig),))


def sum_(a, axis=None):
    v = value_of(a)
    out = v.sum(axis=axis)
    if not isinstance(a, Var):
        return out

    def vjp(g):
        if axis is None:
            return np.broadcast_to(g, v.shape).copy()
        return np.broadcast_to(np.expand_dims(g, axis), v.shape).copy()

    return Var(out, ((a, vjp),))


def mean(a, axis=None):
    v = value_of(a)
    count = v.size if axis is None else v.shape[axis]
    return mul(sum_(a, axis), 1.0 / count)


def getitem(a, idx):
    v = value_of(a)
    out = v[idx]
    if not isinstance(a, Var):
        return out

    def vjp(g):
        full = np.zeros_like(v)
        np.add.at(full, idx, g)
        return full

    return Var(out, ((a, vjp),))
