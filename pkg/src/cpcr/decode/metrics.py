"""Levenshtein alignment and word/character error rates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class EditCounts:
    distance: int
    substitutions: int
    insertions: int
    deletions: int


def edit_distance(ref: Sequence, hyp: Sequence) -> EditCounts:
    """Unit-cost Levenshtein distance with an S/I/D breakdown.

    Insertions are hypothesis tokens absent from the reference alignment;
    deletions are reference tokens the hypothesis dropped. Ties during
    backtrace prefer substitution, then deletion, then insertion.
    """
    n, m = len(ref), len(hyp)
    d = np.zeros((n + 1, m + 1), dtype=np.int64)
    d[:, 0] = np.arange(n + 1)
    d[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            d[i, j] = min(d[i - 1, j - 1] + cost, d[i - 1, j] + 1, d[i, j - 1] + 1)

    subs = ins = dels = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and d[i, j] == d[i - 1, j - 1] + (0 if ref[i - 1] == hyp[j - 1] else 1):
            if ref[i - 1] != hyp[j - 1]:
                subs += 1
            i, j = i - 1, j - 1
        elif i > 0 and d[i, j] == d[i - 1, j] + 1:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return EditCounts(distance=int(d[n, m]), substitutions=subs, insertions=ins, deletions=dels)


def wer(ref: str, hyp: str) -> float:
    """Word error rate: edit distance over words / number of reference words."""
    ref_words = ref.split()
    if not ref_words:
        raise ValueError("WER is undefined for an empty reference")
    return edit_distance(ref_words, hyp.split()).distance / len(ref_words)


def cer(ref: str, hyp: str) -> float:
    """Character error rate over the full character sequences (spaces included)."""
    if not ref:
        raise ValueError("CER is undefined for an empty reference")
    return edit_distance(ref, hyp).distance / len(ref)
