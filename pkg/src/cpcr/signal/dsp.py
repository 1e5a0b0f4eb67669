"""Feature-extraction DSP: radix-2 FFT, mel filterbank, log-filterbank and
spectrogram pipelines, and the windowed-sinc low-pass used by domain perturbation.

Framing follows the usual 25 ms window / 10 ms hop convention so the frame
rate matches the representation model's 160-sample hop and recognition heads
are interchangeable across feature kinds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cpcr.signal.audio import SAMPLE_RATE, AudioUtterance

FRAME_WINDOW = 400  # 25 ms
FRAME_HOP = 160  # 10 ms
FFT_SIZE = 512
N_MELS = 40
LOG_GUARD = 1e-10


@dataclass
class FeatureFrames:
    """Feature matrix (dim x frames) with its hop and kind tag."""

    frames: np.ndarray
    hop_seconds: float
    kind: str  # "log-filterbank" | "spectrogram" | "cpc-context"

    def __post_init__(self) -> None:
        self.frames = np.asarray(self.frames)
        if self.frames.ndim != 2:
            raise ValueError("frames must be 2-d (dim x frames)")
        if not np.isfinite(self.frames).all():
            raise ValueError("feature values must be finite")

    @property
    def dim(self) -> int:
        return self.frames.shape[0]

    @property
    def num_frames(self) -> int:
        return self.frames.shape[1]


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann window of length n."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def fft_radix2(x: np.ndarray) -> np.ndarray:
    """Iterative Cooley-Tukey FFT along the last axis (power-of-two length).

    Accepts real or complex input, vectorizes over leading axes, and matches
    the unnormalized-forward DFT convention X[k] = sum_t x[t] e^{-2i pi kt/n}.
    """
    x = np.asarray(x)
    n = x.shape[-1]
    if n < 1 or n & (n - 1):
        raise ValueError(f"FFT length must be a power of two, got {n}")
    y = x[..., _bit_reverse_indices(n)].astype(np.complex128)
    m = 2
    while m <= n:
        half = m // 2
        tw = np.exp(-2j * np.pi * np.arange(half) / m)
        blocks = y.reshape(*y.shape[:-1], n // m, m)
        even = blocks[..., :half].copy()
        odd = blocks[..., half:] * tw
        blocks[..., :half] = even + odd
        blocks[..., half:] = even - odd
        m *= 2
    return y


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank_weights(n_mels: int = N_MELS, n_fft: int = FFT_SIZE, sample_rate: int = SAMPLE_RATE) -> np.ndarray:
    """Triangular mel filters, (n_mels x n_fft//2+1), spanning 0..Nyquist."""
    n_bins = n_fft // 2 + 1
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(sample_rate / 2.0), n_mels + 2)
    hz_points = mel_to_hz(mel_points)
    bin_freqs = np.arange(n_bins) * sample_rate / n_fft
    weights = np.zeros((n_mels, n_bins))
    for m in range(n_mels):
        lo, center, hi = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (bin_freqs - lo) / (center - lo)
        falling = (hi - bin_freqs) / (hi - center)
        weights[m] = np.maximum(0.0, np.minimum(rising, falling))
    return weights


def frame_count(length: int, window: int = FRAME_WINDOW, hop: int = FRAME_HOP) -> int:
    if length < window:
        raise ValueError(f"signal length {length} is shorter than the analysis window {window}")
    return 1 + (length - window) // hop


def _framed_power_spectrum(u: AudioUtterance, window: int, hop: int, n_fft: int) -> np.ndarray:
    """Hann-windowed frames -> radix-2 FFT -> one-sided power spectrum (frames x bins)."""
    x = u.samples.astype(np.float64)
    n_frames = frame_count(x.size, window, hop)
    starts = np.arange(n_frames) * hop
    frames = np.stack([x[s : s + window] for s in starts]) * hann_window(window)
    padded = np.zeros((n_frames, n_fft))
    padded[:, :window] = frames
    spectrum = fft_radix2(padded)[:, : n_fft // 2 + 1]
    return (spectrum.real**2 + spectrum.imag**2).astype(np.float64)


def log_filterbank(
    u: AudioUtterance,
    window: int = FRAME_WINDOW,
    hop: int = FRAME_HOP,
    n_fft: int = FFT_SIZE,
    n_mels: int = N_MELS,
) -> FeatureFrames:
    """Log mel-filterbank energies, (n_mels x frames); frames = 1 + (L-window)//hop."""
    power = _framed_power_spectrum(u, window, hop, n_fft)
    mel = mel_filterbank_weights(n_mels, n_fft, u.sample_rate)
    energies = power @ mel.T
    return FeatureFrames(
        frames=np.log(energies + LOG_GUARD).T.astype(np.float32),
        hop_seconds=hop / u.sample_rate,
        kind="log-filterbank",
    )


def spectrogram(
    u: AudioUtterance,
    window: int = FRAME_WINDOW,
    hop: int = FRAME_HOP,
    n_fft: int = FFT_SIZE,
) -> FeatureFrames:
    """Log power spectrogram: the filterbank pipeline without the mel stage."""
    power = _framed_power_spectrum(u, window, hop, n_fft)
    return FeatureFrames(
        frames=np.log(power + LOG_GUARD).T.astype(np.float32),
        hop_seconds=hop / u.sample_rate,
        kind="spectrogram",
    )


def fir_lowpass(cutoff_hz: float, taps: int = 63, sample_rate: int = SAMPLE_RATE) -> np.ndarray:
    """Hamming-windowed sinc low-pass FIR, normalized to unit DC gain."""
    if taps % 2 == 0:
        raise ValueError("taps must be odd")
    mid = (taps - 1) / 2
    n = np.arange(taps) - mid
    fc = cutoff_hz / sample_rate
    h = 2.0 * fc * np.sinc(2.0 * fc * n)
    h *= 0.54 + 0.46 * np.cos(np.pi * n / mid)
    return h / h.sum()


def apply_fir(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Zero-phase-length 'same' convolution with the filter."""
    return np.convolve(x.astype(np.float64), h, mode="same")
