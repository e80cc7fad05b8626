"""Minimal reverse-mode automatic differentiation over numpy arrays.

Tensors record their parents and a backward closure when gradients are
enabled; ``Tensor.backward`` replays the tape in reverse topological order.
Inference runs under ``no_grad()`` and pays only the array cost.

Numerical policy: element-wise math stays in the input dtype, but every
reduction that sums across rows (neighbor aggregation, pooling, per-graph
softmax, batch statistics) accumulates in float64 before casting back.
Node order therefore cannot perturb results, which is what makes the
network exactly permutation-equivariant in 32-bit arithmetic.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, Iterable

import numpy as np
import scipy.sparse as sp

from ..errors import ShapeError

_grad_enabled = True


@contextmanager
def no_grad():
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        if not isinstance(data, np.ndarray):
            # preserve float dtype: numpy ufuncs on 0-d arrays return scalars
            arr = np.asarray(data)
            data = arr if arr.dtype.kind == "f" else arr.astype(np.float32)
        self.data = data
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], None] | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def _accum(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = g.copy() if isinstance(g, np.ndarray) else np.asarray(g)
        else:
            self.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        if self.data.size != 1:
            raise ShapeError("backward() requires a scalar loss")
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # operator sugar -----------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"


def parameter(data: np.ndarray) -> Tensor:
    return Tensor(np.ascontiguousarray(data), requires_grad=True)


def _wrap(x, like: Tensor) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=like.data.dtype))


def _node(data: np.ndarray, parents: tuple[Tensor, ...],
          backward: Callable[[np.ndarray], None] | None) -> Tensor:
    out = Tensor(data)
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce ``g`` back to ``shape`` after a broadcast binary op."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, d in enumerate(shape) if d == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


# ---- element-wise binary ops -------------------------------------------

def _pair(a, b) -> tuple[Tensor, Tensor]:
    """Coerce operands to tensors, matching dtype to the tensor operand."""
    if isinstance(a, Tensor):
        return a, _wrap(b, a)
    if isinstance(b, Tensor):
        return _wrap(a, b), b
    a = Tensor(np.asarray(a, dtype=np.float32))
    return a, _wrap(b, a)


def add(a, b) -> Tensor:
    a, b = _pair(a, b)

    def backward(g):
        a._accum(_unbroadcast(g, a.data.shape))
        b._accum(_unbroadcast(g, b.data.shape))

    return _node(a.data + b.data, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = _pair(a, b)

    def backward(g):
        a._accum(_unbroadcast(g, a.data.shape))
        b._accum(_unbroadcast(-g, b.data.shape))

    return _node(a.data - b.data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = _pair(a, b)

    def backward(g):
        a._accum(_unbroadcast(g * b.data, a.data.shape))
        b._accum(_unbroadcast(g * a.data, b.data.shape))

    return _node(a.data * b.data, (a, b), backward)


def div(a, b) -> Tensor:
    a, b = _pair(a, b)

    def backward(g):
        a._accum(_unbroadcast(g / b.data, a.data.shape))
        b._accum(_unbroadcast(-g * a.data / (b.data * b.data), b.data.shape))

    return _node(a.data / b.data, (a, b), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ShapeError(f"matmul expects 2-d operands, got {a.data.shape} @ {b.data.shape}")
    if a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul shape mismatch: {a.data.shape} @ {b.data.shape}")

    def backward(g):
        a._accum(g @ b.data.T)
        b._accum(a.data.T @ g)

    return _node(a.data @ b.data, (a, b), backward)


# ---- element-wise unary ops ----------------------------------------------

def relu(a: Tensor) -> Tensor:
    mask = a.data > 0

    def backward(g):
        a._accum(g * mask)

    return _node(a.data * mask, (a,), backward)


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)

    def backward(g):
        a._accum(g * (1.0 - y * y))

    return _node(y, (a,), backward)


def exp(a: Tensor) -> Tensor:
    y = np.exp(a.data)

    def backward(g):
        a._accum(g * y)

    return _node(y, (a,), backward)


def log(a: Tensor) -> Tensor:
    def backward(g):
        a._accum(g / a.data)

    return _node(np.log(a.data), (a,), backward)


def sqrt(a: Tensor) -> Tensor:
    y = np.sqrt(a.data)

    def backward(g):
        a._accum(g / (2.0 * y))

    return _node(y, (a,), backward)


def pow_const(a: Tensor, p: float) -> Tensor:
    def backward(g):
        a._accum(g * p * a.data ** (p - 1))

    return _node(a.data ** p, (a,), backward)


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    def backward(g):
        a._accum(g.reshape(a.data.shape))

    return _node(a.data.reshape(shape), (a,), backward)


def concat(tensors: list[Tensor], axis: int = 1) -> Tensor:
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        for t, piece in zip(tensors, np.split(g, splits, axis=axis)):
            t._accum(piece)

    return _node(np.concatenate([t.data for t in tensors], axis=axis),
                 tuple(tensors), backward)


def dropout(a: Tensor, rate: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout; call only in train mode."""
    if rate <= 0.0:
        return a
    keep = (rng.random(a.data.shape) >= rate).astype(a.data.dtype)
    scale = a.data.dtype.type(1.0 / (1.0 - rate))

    def backward(g):
        a._accum(g * keep * scale)

    return _node(a.data * keep * scale, (a,), backward)


# ---- reductions (float64 accumulation) -----------------------------------

def tsum(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = np.sum(a.data, axis=axis, keepdims=keepdims, dtype=np.float64)
    out = out.astype(a.data.dtype) if isinstance(out, np.ndarray) else a.data.dtype.type(out)

    def backward(g):
        gg = np.asarray(g)
        if axis is not None and not keepdims:
            gg = np.expand_dims(gg, axis)
        a._accum(np.broadcast_to(gg, a.data.shape).astype(a.data.dtype, copy=False))

    return _node(np.asarray(out), (a,), backward)


def tmean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    if axis is None:
        count = a.data.size
    else:
        count = a.data.shape[axis]
    out = (np.sum(a.data, axis=axis, keepdims=keepdims, dtype=np.float64) / count).astype(a.data.dtype)

    def backward(g):
        gg = np.asarray(g) / count
        if axis is not None and not keepdims:
            gg = np.expand_dims(gg, axis)
        a._accum(np.broadcast_to(gg, a.data.shape).astype(a.data.dtype, copy=False))

    return _node(np.asarray(out), (a,), backward)


# ---- graph-structured ops -------------------------------------------------

def spmm(adj: sp.csr_matrix, x: Tensor) -> Tensor:
    """Sparse (constant) @ dense product in float64, cast back to x's dtype.

    Used for neighbor sums; ``adj`` must be float64 CSR.
    """
    y = (adj @ x.data.astype(np.float64, copy=False)).astype(x.data.dtype)
    adj_t = adj.T.tocsr()

    def backward(g):
        x._accum((adj_t @ g.astype(np.float64, copy=False)).astype(x.data.dtype))

    return _node(y, (x,), backward)


def _starts(offsets: np.ndarray) -> np.ndarray:
    return offsets[:-1]


def _lengths(offsets: np.ndarray) -> np.ndarray:
    return np.diff(offsets)


def segment_sum(x: Tensor, offsets: np.ndarray) -> Tensor:
    """Sum rows of x within contiguous segments. offsets has G+1 entries."""
    y = np.add.reduceat(x.data.astype(np.float64, copy=False), _starts(offsets), axis=0)
    lens = _lengths(offsets)

    def backward(g):
        x._accum(np.repeat(g, lens, axis=0).astype(x.data.dtype, copy=False))

    return _node(y.astype(x.data.dtype), (x,), backward)


def segment_mean(x: Tensor, offsets: np.ndarray) -> Tensor:
    lens = _lengths(offsets)
    scale = lens.astype(np.float64).reshape(-1, *([1] * (x.data.ndim - 1)))
    y = np.add.reduceat(x.data.astype(np.float64, copy=False), _starts(offsets), axis=0) / scale

    def backward(g):
        x._accum(np.repeat(g / scale.astype(g.dtype), lens, axis=0).astype(x.data.dtype, copy=False))

    return _node(y.astype(x.data.dtype), (x,), backward)


def segment_log_softmax(x: Tensor, offsets: np.ndarray) -> Tensor:
    """Log-softmax of a flat vector within contiguous segments.

    The per-segment max shift is treated as a constant, which leaves values
    and gradients exact while guarding against overflow.
    """
    if x.data.ndim != 1:
        raise ShapeError("segment_log_softmax expects a flat vector")
    starts = _starts(offsets)
    lens = _lengths(offsets)
    x64 = x.data.astype(np.float64, copy=False)
    seg_max = np.maximum.reduceat(x64, starts)
    shifted = x64 - np.repeat(seg_max, lens)
    e = np.exp(shifted)
    denom = np.add.reduceat(e, starts)
    y64 = shifted - np.repeat(np.log(denom), lens)
    softmax = e / np.repeat(denom, lens)

    def backward(g):
        g64 = g.astype(np.float64, copy=False)
        seg_g = np.add.reduceat(g64, starts)
        x._accum((g64 - softmax * np.repeat(seg_g, lens)).astype(x.data.dtype))

    return _node(y64.astype(x.data.dtype), (x,), backward)
