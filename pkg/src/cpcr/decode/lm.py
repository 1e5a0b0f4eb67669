"""Add-alpha smoothed character n-gram language model.

Conditionals are smoothed over the characters plus an end-of-string marker
(support size |V|+1), so every conditional sums to exactly 1 and an unseen
context backs off to the uniform 1/(|V|+1). Only character events are
counted during estimation; the end marker is scored from smoothing mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

BOS = "\x02"
EOS = "\x03"


@dataclass
class CharNgramLm:
    order: int
    alpha: float
    chars: tuple[str, ...]
    counts: dict[str, dict[str, int]] = field(default_factory=dict)
    context_totals: dict[str, int] = field(default_factory=dict)

    @property
    def support_size(self) -> int:
        return len(self.chars) + 1  # characters + end marker

    def cond_logprob(self, context: str, symbol: str) -> float:
        """log P(symbol | last order-1 characters); symbol may be EOS."""
        if symbol != EOS and symbol not in self.chars:
            raise ValueError(f"symbol {symbol!r} is outside the model vocabulary")
        ctx = context[-(self.order - 1) :] if self.order > 1 else ""
        table = self.counts.get(ctx, None)
        total = self.context_totals.get(ctx, 0)
        count = 0 if table is None else table.get(symbol, 0)
        return math.log((count + self.alpha) / (total + self.alpha * self.support_size))

    def pad_context(self, prefix: str) -> str:
        """Context window for the next symbol after `prefix` (BOS padded)."""
        if self.order == 1:
            return ""
        return (BOS * (self.order - 1) + prefix)[-(self.order - 1) :]


def train_char_lm(transcripts: Iterable[str], order: int = 4, alpha: float = 0.1) -> CharNgramLm:
    """Estimate the model from raw transcripts."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    transcripts = list(transcripts)
    if not transcripts:
        raise ValueError("cannot train a language model on an empty corpus")
    chars = tuple(sorted({c for t in transcripts for c in t}))
    lm = CharNgramLm(order=order, alpha=alpha, chars=chars)
    for t in transcripts:
        padded = BOS * (order - 1) + t
        for i, ch in enumerate(t):
            ctx = padded[i : i + order - 1]
            table = lm.counts.setdefault(ctx, {})
            table[ch] = table.get(ch, 0) + 1
            lm.context_totals[ctx] = lm.context_totals.get(ctx, 0) + 1
    return lm


def lm_score(lm: CharNgramLm, text: str) -> float:
    """Sum of conditional log-probs over the characters plus the end marker."""
    score = 0.0
    prefix = ""
    for ch in text:
        score += lm.cond_logprob(lm.pad_context(prefix), ch)
        prefix += ch
    score += lm.cond_logprob(lm.pad_context(prefix), EOS)
    return score
