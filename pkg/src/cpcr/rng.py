"""Deterministic random-stream derivation from a single master seed."""

from __future__ import annotations

import hashlib

import numpy as np


def _label_entropy(label: str | int) -> int:
    if isinstance(label, int):
        return label & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_rng(seed: int, *labels: str | int) -> np.random.Generator:
    """Generator for the stream named by `labels`, independent per label path."""
    entropy = [seed & 0xFFFFFFFFFFFFFFFF] + [_label_entropy(x) for x in labels]
    return np.random.default_rng(np.random.SeedSequence(entropy))
