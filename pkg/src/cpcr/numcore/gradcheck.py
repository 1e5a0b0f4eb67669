"""Finite-difference verification of analytic gradients.

The numeric oracle is a central difference with a per-element step
h = h_scale * (1 + |x|), evaluated by re-running the forward function on
perturbed copies of the inputs; it never touches the autodiff machinery.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from cpcr.numcore.tensor import Tensor


def numeric_gradients(
    f: Callable[..., float], arrays: Sequence[np.ndarray], h_scale: float = 1e-4
) -> list[np.ndarray]:
    """Central-difference gradients of scalar f(*arrays) w.r.t. every array."""
    grads = []
    for i, base in enumerate(arrays):
        g = np.zeros_like(base, dtype=np.float64)
        flat = g.reshape(-1)
        for j in range(base.size):
            h = h_scale * (1.0 + abs(float(base.reshape(-1)[j])))
            plus = [a.copy() for a in arrays]
            minus = [a.copy() for a in arrays]
            plus[i].reshape(-1)[j] += h
            minus[i].reshape(-1)[j] -= h
            flat[j] = (f(*plus) - f(*minus)) / (2.0 * h)
        grads.append(g)
    return grads


def check_gradients(
    build: Callable[..., Tensor],
    arrays: Sequence[np.ndarray],
    h_scale: float = 1e-4,
) -> float:
    """Max relative error between analytic and finite-difference gradients.

    `build(*tensors)` must return a scalar Tensor. Relative error is
    |a - n| / max(1, |a|, |n|) per element, maximized over all inputs.
    """
    tensors = [Tensor(a, requires_grad=True) for a in arrays]
    loss = build(*tensors)
    loss.backward()
    analytic = [t.grad if t.grad is not None else np.zeros_like(t.data) for t in tensors]

    def f(*xs: np.ndarray) -> float:
        return build(*[Tensor(x) for x in xs]).item()

    numeric = numeric_gradients(f, arrays, h_scale=h_scale)
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(n)))
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
