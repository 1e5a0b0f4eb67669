"""CTC negative log-likelihood via the forward algorithm in log space.

The loss equals -log of the summed probability of every frame alignment that
collapses (merge repeats, delete blanks) to the label. Gradients come from
the forward/backward (alpha/beta) occupancy posteriors, so the loss is a
single fused autodiff op rather than a T x S graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cpcr.asr.vocab import CharVocab
from cpcr.numcore.tensor import Tensor, accumulate, make_op

NEG_INF = float("-inf")


class CtcLengthError(ValueError):
    """Label cannot be aligned: T < |label| + number of adjacent repeats."""


@dataclass
class FramePosteriors:
    """Per-frame log-probabilities, (frames x num_classes), blank at column 0."""

    log_probs: np.ndarray

    def __post_init__(self) -> None:
        self.log_probs = np.asarray(self.log_probs)
        if self.log_probs.ndim != 2:
            raise ValueError("log_probs must be 2-d (frames x classes)")
        rows = np.log(np.exp(self.log_probs).sum(axis=1))
        if np.max(np.abs(rows)) > 1e-5:
            raise ValueError("rows must be normalized log-probabilities")

    @property
    def num_frames(self) -> int:
        return self.log_probs.shape[0]

    @property
    def num_classes(self) -> int:
        return self.log_probs.shape[1]


def min_frames_for(label_ids: list[int]) -> int:
    repeats = sum(1 for a, b in zip(label_ids, label_ids[1:]) if a == b)
    return len(label_ids) + repeats


def _extend_with_blanks(label_ids: list[int]) -> np.ndarray:
    ext = np.zeros(2 * len(label_ids) + 1, dtype=np.int64)
    ext[1::2] = label_ids
    return ext


def _forward_alphas(logp: np.ndarray, ext: np.ndarray) -> np.ndarray:
    t_len = logp.shape[0]
    s_len = ext.size
    skip_ok = np.zeros(s_len, dtype=bool)
    skip_ok[2:] = (ext[2:] != 0) & (ext[2:] != ext[:-2])
    alpha = np.full((t_len, s_len), NEG_INF)
    alpha[0, 0] = logp[0, ext[0]]
    if s_len > 1:
        alpha[0, 1] = logp[0, ext[1]]
    for t in range(1, t_len):
        stay = alpha[t - 1]
        step = np.concatenate([[NEG_INF], alpha[t - 1, :-1]])
        acc = np.logaddexp(stay, step)
        skip = np.concatenate([[NEG_INF, NEG_INF], alpha[t - 1, :-2]])
        acc = np.where(skip_ok, np.logaddexp(acc, skip), acc)
        alpha[t] = acc + logp[t, ext]
    return alpha


def _backward_betas(logp: np.ndarray, ext: np.ndarray) -> np.ndarray:
    t_len = logp.shape[0]
    s_len = ext.size
    skip_ok = np.zeros(s_len, dtype=bool)
    skip_ok[: s_len - 2] = (ext[:-2] != 0) & (ext[:-2] != ext[2:])
    beta = np.full((t_len, s_len), NEG_INF)
    beta[t_len - 1, s_len - 1] = 0.0
    if s_len > 1:
        beta[t_len - 1, s_len - 2] = 0.0
    for t in range(t_len - 2, -1, -1):
        emit = logp[t + 1, ext]
        stay = beta[t + 1] + emit
        step = np.concatenate([beta[t + 1, 1:] + emit[1:], [NEG_INF]])
        acc = np.logaddexp(stay, step)
        skip = np.concatenate([beta[t + 1, 2:] + emit[2:], [NEG_INF, NEG_INF]])
        acc = np.where(skip_ok, np.logaddexp(acc, skip), acc)
        beta[t] = acc
    return beta


def ctc_loss(posteriors: Tensor | FramePosteriors | np.ndarray, label: str, vocab: CharVocab) -> Tensor:
    """Negative log-likelihood of `label` under the frame posteriors.

    Raises CtcLengthError when the label (with its mandatory blanks between
    repeated characters) cannot fit in the available frames, and VocabError
    for out-of-vocabulary characters. A label that fits but has zero
    probability yields +inf loss with zero gradients.
    """
    if isinstance(posteriors, FramePosteriors):
        posteriors = Tensor(posteriors.log_probs)
    elif not isinstance(posteriors, Tensor):
        posteriors = Tensor(np.asarray(posteriors))
    if not label:
        raise ValueError("label must be non-empty")
    ids = vocab.encode(label)
    t_len = posteriors.shape[0]
    need = min_frames_for(ids)
    if t_len < need:
        raise CtcLengthError(f"label needs at least {need} frames but posteriors have {t_len}")

    logp = posteriors.data.astype(np.float64)
    ext = _extend_with_blanks(ids)
    with np.errstate(invalid="ignore"):
        alpha = _forward_alphas(logp, ext)
        tail = alpha[t_len - 1, ext.size - 1]
        if ext.size > 1:
            tail = np.logaddexp(tail, alpha[t_len - 1, ext.size - 2])
    log_z = float(tail)
    loss = np.asarray(-log_z, dtype=posteriors.dtype)

    def backward(out: Tensor) -> None:
        if not np.isfinite(log_z):
            accumulate(posteriors, np.zeros_like(posteriors.data))
            return
        with np.errstate(invalid="ignore"):
            beta = _backward_betas(logp, ext)
            gamma = np.exp(alpha + beta - log_z)  # occupancy per (t, state)
        grad = np.zeros_like(logp)
        for s, sym in enumerate(ext):
            grad[:, sym] -= gamma[:, s]
        accumulate(posteriors, float(out.grad) * grad)

    return make_op(loss, (posteriors,), backward)
