"""RIFF/WAVE PCM16 mono 16 kHz reader and writer."""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

from cpcr.signal.audio import SAMPLE_RATE, AudioUtterance

_SCALE = 32768.0


class WavFormatError(ValueError):
    """File is not PCM16 mono 16 kHz; the message names the offending field."""


def read_wav(path: str | Path) -> AudioUtterance:
    """Load a PCM16 mono 16 kHz file; samples are scaled to [-1, 1)."""
    with wave.open(str(path), "rb") as f:
        if f.getcomptype() != "NONE":
            raise WavFormatError(f"codec: expected uncompressed PCM, got {f.getcomptype()!r}")
        if f.getsampwidth() != 2:
            raise WavFormatError(f"sample_width: expected 2 bytes (PCM16), got {f.getsampwidth()}")
        if f.getnchannels() != 1:
            raise WavFormatError(f"channels: expected mono (1), got {f.getnchannels()}")
        if f.getframerate() != SAMPLE_RATE:
            raise WavFormatError(f"sample_rate: expected {SAMPLE_RATE} Hz, got {f.getframerate()}")
        raw = f.readframes(f.getnframes())
    pcm = np.frombuffer(raw, dtype="<i2")
    if pcm.size < 1:
        raise WavFormatError("frames: file contains no audio frames")
    return AudioUtterance(samples=(pcm.astype(np.float32) / _SCALE), utterance_id=Path(path).stem)


def write_wav(utterance: AudioUtterance, path: str | Path) -> None:
    """Write PCM16 mono 16 kHz; write->read reproduces samples within 1 LSB."""
    pcm = np.clip(np.rint(utterance.samples * _SCALE), -32768, 32767).astype("<i2")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1)
        f.setsampwidth(2)
        f.setframerate(SAMPLE_RATE)
        f.writeframes(pcm.tobytes())
