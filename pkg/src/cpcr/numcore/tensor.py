"""Reverse-mode autodiff over dense numpy arrays.

A Tensor wraps an ndarray plus an optional gradient buffer and a record of the
operation that produced it. Graphs are built eagerly by the op functions below;
`Tensor.backward()` runs an iterative topological sweep. float32 is the training
dtype, float64 is used by the verification suite; ops preserve the input dtype.
"""

from __future__ import annotations

import contextlib
from typing import Callable, Sequence

import numpy as np

FLOAT_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))

_grad_enabled = True


class NumericsError(RuntimeError):
    """Raised when an operation produces non-finite values from finite inputs."""


@contextlib.contextmanager
def no_grad():
    """Disable graph recording inside the context (inference / data paths)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def _as_float_array(data, dtype=None) -> np.ndarray:
    arr = np.asarray(data)
    if dtype is not None:
        return np.ascontiguousarray(arr, dtype=dtype)
    if arr.dtype in FLOAT_DTYPES:
        return arr
    return arr.astype(np.float32)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        self.data: np.ndarray = _as_float_array(data, dtype)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad) and _grad_enabled
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[], None] | None = None

    # -- basic introspection ------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    # -- autodiff -----------------------------------------------------------
    def backward(self, check_finite: bool = True) -> None:
        """Backpropagate from a scalar; populates .grad on every reachable leaf.

        Leaves that do not influence this value keep a zero gradient (allocated
        lazily by the optimizer side as needed). Raises on a non-scalar target
        or, when `check_finite`, on non-finite leaf gradients.
        """
        if self.data.size != 1:
            raise ValueError(f"backward target must be scalar, got shape {self.data.shape}")
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward()
        if check_finite:
            for node in topo:
                if node._backward is None and node.requires_grad and node.grad is not None:
                    if not np.isfinite(node.grad).all():
                        raise NumericsError("non-finite gradient produced by backward pass")

    def zero_grad(self) -> None:
        self.grad = None

    # -- operator sugar -----------------------------------------------------
    def __add__(self, other):
        return add(self, _lift(other, self))

    def __radd__(self, other):
        return add(_lift(other, self), self)

    def __sub__(self, other):
        return sub(self, _lift(other, self))

    def __rsub__(self, other):
        return sub(_lift(other, self), self)

    def __mul__(self, other):
        return mul(self, _lift(other, self))

    def __rmul__(self, other):
        return mul(_lift(other, self), self)

    def __truediv__(self, other):
        return div(self, _lift(other, self))

    def __rtruediv__(self, other):
        return div(_lift(other, self), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return pow_scalar(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return getitem(self, key)

    # method forms of the common ops
    def exp(self):
        return exp(self)

    def log(self):
        return log(self)

    def tanh(self):
        return tanh(self)

    def sigmoid(self):
        return sigmoid(self)

    def relu(self):
        return relu(self)

    def sum(self, axis=None, keepdims=False):
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return transpose(self, axes if axes else None)

    @property
    def T(self):
        return transpose(self, None)

    def flip(self, axis):
        return flip(self, axis)

    def take(self, indices, axis=0):
        return take(self, indices, axis=axis)

    def logsumexp(self, axis, keepdims=False):
        return logsumexp(self, axis=axis, keepdims=keepdims)

    def log_softmax(self, axis):
        return log_softmax(self, axis=axis)

    def softmax(self, axis):
        return softmax(self, axis=axis)


def _lift(value, like: Tensor) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=like.data.dtype))


def _check_finite(out: np.ndarray, parents: Sequence[Tensor]) -> None:
    if np.isfinite(out).all():
        return
    # Non-finite inputs may legitimately propagate (e.g. -inf log probabilities);
    # only finite-in/non-finite-out is an error.
    if all(np.isfinite(p.data).all() for p in parents):
        raise NumericsError("operation produced non-finite values from finite inputs")


def make_op(data: np.ndarray, parents: Sequence[Tensor], backward: Callable[[Tensor], None] | None) -> Tensor:
    """Wrap `data` as the result of an op over `parents`.

    `backward(out)` must add each parent's contribution into `parent.grad`
    (use `accumulate`). This is the extension point for fused ops defined
    outside this module (convolutions, CTC, ...).
    """
    _check_finite(np.asarray(data), parents)
    requires = _grad_enabled and any(p.requires_grad for p in parents)
    out = Tensor(data)
    out.requires_grad = requires
    if requires and backward is not None:
        out._parents = tuple(parents)
        out._backward = lambda: backward(out)
    return out


def accumulate(t: Tensor, g: np.ndarray) -> None:
    """Add `g` into t.grad, creating the buffer on first use."""
    if not t.requires_grad:
        return
    if g.dtype != t.data.dtype:
        g = g.astype(t.data.dtype)
    if g.shape != t.data.shape:
        g = _unbroadcast(g, t.data.shape)
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    t.grad += g


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, (gs, ss) in enumerate(zip(g.shape, shape)):
        if ss == 1 and gs != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g.reshape(shape)


# -- elementwise and arithmetic ops -----------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, out.grad)
        accumulate(b, out.grad)

    return make_op(a.data + b.data, (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, out.grad)
        accumulate(b, -out.grad)

    return make_op(a.data - b.data, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, out.grad * b.data)
        accumulate(b, out.grad * a.data)

    return make_op(a.data * b.data, (a, b), backward)


def div(a: Tensor, b: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, out.grad / b.data)
        accumulate(b, -out.grad * a.data / (b.data * b.data))

    with np.errstate(divide="ignore", invalid="ignore"):
        data = a.data / b.data
    return make_op(data, (a, b), backward)


def neg(a: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, -out.grad)

    return make_op(-a.data, (a,), backward)


def pow_scalar(a: Tensor, exponent: float) -> Tensor:
    if not isinstance(exponent, (int, float)):
        raise TypeError("only scalar exponents are supported")

    def backward(out: Tensor) -> None:
        accumulate(a, out.grad * exponent * a.data ** (exponent - 1))

    return make_op(a.data**exponent, (a,), backward)


def exp(a: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, out.grad * out.data)

    return make_op(np.exp(a.data), (a,), backward)


def log(a: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, out.grad / a.data)

    with np.errstate(divide="ignore", invalid="ignore"):
        data = np.log(a.data)
    return make_op(data, (a,), backward)


def tanh(a: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, out.grad * (1.0 - out.data * out.data))

    return make_op(np.tanh(a.data), (a,), backward)


def sigmoid(a: Tensor) -> Tensor:
    y = 1.0 / (1.0 + np.exp(-a.data))

    def backward(out: Tensor) -> None:
        accumulate(a, out.grad * out.data * (1.0 - out.data))

    return make_op(y, (a,), backward)


def relu(a: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, out.grad * (a.data > 0))

    return make_op(np.maximum(a.data, 0), (a,), backward)


# -- reductions --------------------------------------------------------------

def _norm_axis(axis, ndim) -> tuple[int, ...]:
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(a % ndim for a in axis)


def sum_(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    axes = _norm_axis(axis, a.ndim)

    def backward(out: Tensor) -> None:
        g = out.grad
        if not keepdims:
            for ax in sorted(axes):
                g = np.expand_dims(g, ax)
        accumulate(a, np.broadcast_to(g, a.data.shape))

    return make_op(a.data.sum(axis=axes, keepdims=keepdims), (a,), backward)


def mean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    axes = _norm_axis(axis, a.ndim)
    count = 1
    for ax in axes:
        count *= a.data.shape[ax]

    def backward(out: Tensor) -> None:
        g = out.grad / count
        if not keepdims:
            for ax in sorted(axes):
                g = np.expand_dims(g, ax)
        accumulate(a, np.broadcast_to(g, a.data.shape))

    return make_op(a.data.mean(axis=axes, keepdims=keepdims), (a,), backward)


def logsumexp(a: Tensor, axis, keepdims: bool = False) -> Tensor:
    axes = _norm_axis(axis, a.ndim)
    m = np.max(a.data, axis=axes, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    s = np.sum(np.exp(a.data - m), axis=axes, keepdims=True)
    out_keep = m + np.log(s)
    data = out_keep if keepdims else np.squeeze(out_keep, axis=axes)

    def backward(out: Tensor) -> None:
        g = out.grad
        if not keepdims:
            for ax in sorted(axes):
                g = np.expand_dims(g, ax)
        accumulate(a, g * np.exp(a.data - out_keep))

    return make_op(data, (a,), backward)


def log_softmax(a: Tensor, axis: int) -> Tensor:
    lse = a.data - _raw_logsumexp(a.data, axis)
    ax = axis % a.ndim

    def backward(out: Tensor) -> None:
        g = out.grad
        accumulate(a, g - np.exp(out.data) * g.sum(axis=ax, keepdims=True))

    return make_op(lse, (a,), backward)


def softmax(a: Tensor, axis: int) -> Tensor:
    y = np.exp(a.data - _raw_logsumexp(a.data, axis))
    ax = axis % a.ndim

    def backward(out: Tensor) -> None:
        g = out.grad
        dot = (g * out.data).sum(axis=ax, keepdims=True)
        accumulate(a, out.data * (g - dot))

    return make_op(y, (a,), backward)


def _raw_logsumexp(x: np.ndarray, axis: int) -> np.ndarray:
    m = np.max(x, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    return m + np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True))


# -- linear algebra ----------------------------------------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    def backward(out: Tensor) -> None:
        g = out.grad
        if b.ndim == 1:
            raise NotImplementedError("matmul backward with 1-d operands is unsupported")
        accumulate(a, g @ np.swapaxes(b.data, -1, -2))
        accumulate(b, np.swapaxes(a.data, -1, -2) @ g)

    return make_op(a.data @ b.data, (a, b), backward)


# -- shape manipulation -------------------------------------------------------

def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, out.grad.reshape(a.data.shape))

    return make_op(a.data.reshape(shape), (a,), backward)


def transpose(a: Tensor, axes: tuple[int, ...] | None = None) -> Tensor:
    if axes is None:
        axes = tuple(reversed(range(a.ndim)))
    inverse = np.argsort(axes)

    def backward(out: Tensor) -> None:
        accumulate(a, out.grad.transpose(inverse))

    return make_op(a.data.transpose(axes), (a,), backward)


def getitem(a: Tensor, key) -> Tensor:
    def backward(out: Tensor) -> None:
        g = np.zeros_like(a.data)
        np.add.at(g, key, out.grad)
        accumulate(a, g)

    return make_op(a.data[key], (a,), backward)


def take(a: Tensor, indices, axis: int = 0) -> Tensor:
    """Gather rows along axis 0 with an arbitrary integer index array."""
    if axis != 0:
        raise NotImplementedError("take supports axis=0 only")
    idx = np.asarray(indices)

    def backward(out: Tensor) -> None:
        g = np.zeros_like(a.data)
        np.add.at(g, idx.reshape(-1), out.grad.reshape((-1,) + a.data.shape[1:]))
        accumulate(a, g)

    return make_op(a.data[idx], (a,), backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = list(tensors)
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(out: Tensor) -> None:
        for t, start, stop in zip(tensors, offsets[:-1], offsets[1:]):
            sl = [slice(None)] * out.grad.ndim
            sl[axis] = slice(start, stop)
            accumulate(t, out.grad[tuple(sl)])

    return make_op(np.concatenate([t.data for t in tensors], axis=axis), tensors, backward)


def flip(a: Tensor, axis: int) -> Tensor:
    def backward(out: Tensor) -> None:
        accumulate(a, np.flip(out.grad, axis=axis))

    return make_op(np.ascontiguousarray(np.flip(a.data, axis=axis)), (a,), backward)
