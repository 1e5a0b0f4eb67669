"""Adam, global-norm gradient clipping, and learning-rate schedules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cpcr.numcore.tensor import NumericsError, Tensor

# Slack factor so that re-clipping an already-clipped gradient set is a bit-exact no-op.
_CLIP_SLACK = 1.0 + 1e-6


@dataclass
class AdamState:
    """First/second moment buffers keyed like the parameter dict, plus the step count."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def adam_init(params: dict[str, Tensor], beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    return AdamState(
        m={k: np.zeros_like(p.data) for k, p in params.items()},
        v={k: np.zeros_like(p.data) for k, p in params.items()},
        step=0,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
    )


def adam_step(params: dict[str, Tensor], grads: dict[str, np.ndarray], state: AdamState, lr: float) -> AdamState:
    """One bias-corrected Adam update, in place on `params`."""
    if lr < 0:
        raise ValueError("learning rate must be >= 0")
    state.step += 1
    bc1 = 1.0 - state.beta1**state.step
    bc2 = 1.0 - state.beta2**state.step
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p.data)
        if not np.isfinite(g).all():
            raise NumericsError(f"non-finite gradient for parameter '{name}'")
        if g.shape != p.data.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter '{name}' {p.data.shape}")
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p.data -= (lr / bc1) * m / (np.sqrt(v / bc2) + state.eps)
    return state


def clip_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> tuple[dict[str, np.ndarray], float]:
    """Scale all gradients by max_norm/norm when the global L2 norm exceeds max_norm.

    Returns (grads, global_norm_before_clipping). Gradients already within the
    bound are returned untouched, so the operation is idempotent bit-for-bit.
    """
    if max_norm <= 0:
        raise ValueError("max_norm must be > 0")
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g.astype(np.float64) ** 2))
    norm = float(np.sqrt(total))
    if norm > max_norm * _CLIP_SLACK:
        scale = max_norm / norm
        for name, g in grads.items():
            grads[name] = (g * scale).astype(g.dtype)
    return grads, norm


@dataclass
class LrSchedule:
    """Constant or polynomial-decay learning rate."""

    kind: str = "constant"  # "constant" | "polynomial"
    base: float = 1e-4
    power: float = 2.0
    total_steps: int = 1
    end: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "polynomial"):
            raise ValueError(f"unknown schedule kind '{self.kind}'")
        if self.kind == "polynomial" and self.total_steps < 1:
            raise ValueError("polynomial schedule needs total_steps >= 1")


def schedule_rate(schedule: LrSchedule, step: int) -> float:
    """Rate at `step`; polynomial decays from base to end, steps past total clamp to end."""
    if schedule.kind == "constant":
        return schedule.base
    frac = 1.0 - min(max(step, 0), schedule.total_steps) / schedule.total_steps
    w = frac**schedule.power
    return schedule.base * w + schedule.end * (1.0 - w)
