"""Raw utterances, per-utterance normalization, and random cropping."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

SAMPLE_RATE = 16000

# Default crop window: 9.35 s at 16 kHz.
CROP_WINDOW = 149_600


@dataclass
class AudioUtterance:
    """Mono 16 kHz signal with identity, transcript, and corpus tags."""

    samples: np.ndarray
    utterance_id: str = ""
    transcript: str | None = None
    language: str = ""
    domain: str = ""
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples)
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ValueError("samples must be a non-empty 1-d array")
        if self.sample_rate != SAMPLE_RATE:
            raise ValueError(f"sample_rate must be {SAMPLE_RATE}, got {self.sample_rate}")
        if not np.isfinite(self.samples).all():
            raise ValueError("samples must be finite")

    @property
    def duration_seconds(self) -> float:
        return self.samples.size / self.sample_rate

    def __len__(self) -> int:
        return self.samples.size


def normalize_utterance(u: AudioUtterance, eps: float = 1e-8) -> AudioUtterance:
    """Standardize to zero mean / unit variance over the whole utterance.

    Statistics are computed in float64; constant signals map to zeros under
    the variance guard. scale-invariant: normalize(k*x) == normalize(x).
    """
    x = u.samples.astype(np.float64)
    mu = x.mean()
    var = x.var()
    y = (x - mu) / np.sqrt(var + eps)
    return replace(u, samples=y.astype(u.samples.dtype if u.samples.dtype in (np.float32, np.float64) else np.float32))


def random_crop(u: AudioUtterance, window: int = CROP_WINDOW, rng: np.random.Generator | None = None) -> AudioUtterance:
    """Uniformly positioned contiguous crop of exactly `window` samples.

    Signals shorter than the window are right-padded with zeros instead of
    rejected, so tiny corpora stay usable.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    n = u.samples.size
    if n >= window:
        if n == window:
            start = 0
        else:
            if rng is None:
                raise ValueError("rng is required when the signal is longer than the window")
            start = int(rng.integers(0, n - window + 1))
        cropped = u.samples[start : start + window]
    else:
        cropped = np.concatenate([u.samples, np.zeros(window - n, dtype=u.samples.dtype)])
    return replace(u, samples=cropped)
