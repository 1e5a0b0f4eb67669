"""Greedy CTC decoding and prefix beam search with optional character LM fusion.

The beam search keeps per-prefix blank/non-blank path sums (so an unpruned
beam returns the exact maximum-probability labeling), and restricts the
symbols considered at each frame to the `beam_width` most probable ones.
That per-frame character pruning makes width 1 degenerate to exactly the
greedy argmax-and-collapse decode, while any width >= |V|+1 imposes no
restriction at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cpcr.decode.lm import CharNgramLm

NEG_INF = float("-inf")


@dataclass
class DecodeResult:
    text: str
    score: float
    frame_labels: list[int] | None = None  # greedy only


def _collapse(trace: list[int], blank: int = 0) -> list[int]:
    out = []
    prev = None
    for s in trace:
        if s != blank and s != prev:
            out.append(s)
        prev = s
    return out


def greedy_ctc_decode(log_probs: np.ndarray, chars: str) -> DecodeResult:
    """Per-frame argmax -> collapse repeats -> drop blanks.

    `log_probs` is (T, |V|+1) with blank at column 0 and columns 1.. mapping
    to `chars`. Argmax ties break toward the lower index. The score is the
    joint log-probability of the argmax trace.
    """
    log_probs = np.asarray(log_probs)
    trace = np.argmax(log_probs, axis=1)
    score = float(log_probs[np.arange(log_probs.shape[0]), trace].sum())
    labels = _collapse(list(int(s) for s in trace))
    return DecodeResult(
        text="".join(chars[i - 1] for i in labels),
        score=score,
        frame_labels=[int(s) for s in trace],
    )


def prefix_beam_search(
    log_probs: np.ndarray,
    chars: str,
    beam_width: int,
    lm: CharNgramLm | None = None,
    lm_weight: float = 0.5,
    insertion_bonus: float = 0.0,
) -> DecodeResult:
    """CTC prefix beam search over (T, |V|+1) log posteriors (blank = column 0).

    With an LM, each appended character c adds lm_weight * log P_lm(c | prefix)
    + insertion_bonus to the hypothesis score. Pruning ties break toward the
    lexicographically lower prefix (lower vocabulary indices first).
    """
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    log_probs = np.asarray(log_probs)
    t_len, n_sym = log_probs.shape

    # beams: prefix (tuple of 1-based char indices) -> [log p_blank, log p_nonblank]
    beams: dict[tuple[int, ...], list[float]] = {(): [0.0, NEG_INF]}

    def lm_term(prefix: tuple[int, ...], c: int) -> float:
        bonus = insertion_bonus
        if lm is None or lm_weight == 0.0:
            return bonus
        text = "".join(chars[i - 1] for i in prefix)
        return lm_weight * lm.cond_logprob(lm.pad_context(text), chars[c - 1]) + bonus

    for t in range(t_len):
        row = log_probs[t]
        # stable sort keeps the lower index first on ties, matching argmax
        allowed = np.argsort(-row, kind="stable")[: min(beam_width, n_sym)]
        next_beams: dict[tuple[int, ...], list[float]] = {}

        def bump(prefix: tuple[int, ...], which: int, value: float) -> None:
            if value == NEG_INF:
                return
            entry = next_beams.setdefault(prefix, [NEG_INF, NEG_INF])
            entry[which] = np.logaddexp(entry[which], value)

        for prefix, (p_b, p_nb) in beams.items():
            total = np.logaddexp(p_b, p_nb)
            last = prefix[-1] if prefix else None
            for c in allowed:
                c = int(c)
                lp = float(row[c])
                if c == 0:
                    bump(prefix, 0, total + lp)
                elif c == last:
                    bump(prefix, 1, p_nb + lp)  # repeat merges into the same prefix
                    if p_b > NEG_INF:
                        bump(prefix + (c,), 1, p_b + lp + lm_term(prefix, c))
                else:
                    bump(prefix + (c,), 1, total + lp + lm_term(prefix, c))

        ranked = sorted(
            next_beams.items(),
            key=lambda kv: (-np.logaddexp(kv[1][0], kv[1][1]), kv[0]),
        )
        beams = dict(ranked[:beam_width])

    best_prefix, (p_b, p_nb) = min(
        beams.items(), key=lambda kv: (-np.logaddexp(kv[1][0], kv[1][1]), kv[0])
    )
    return DecodeResult(
        text="".join(chars[i - 1] for i in best_prefix),
        score=float(np.logaddexp(p_b, p_nb)),
        frame_labels=None,
    )
