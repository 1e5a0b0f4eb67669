"""Synthetic multi-domain, multilingual speech-like corpora.

A "language" is a small inventory of symbols, each rendered as a tone complex
(2-3 fixed sinusoid "formants" under a raised-cosine envelope); transcripts
are random words of those symbols separated by spaces, and a space is a
silence gap. A "domain" perturbs the finished clean waveform with gain, pitch
scaling, low-pass filtering, and additive noise at a target SNR.

Clean content (transcript + waveform) depends only on (seed, language, index),
never on the domain, so parallel corpora across domains differ exactly in the
perturbation stage — the matched condition the transfer experiments rely on.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from cpcr.rng import derive_rng
from cpcr.signal.audio import SAMPLE_RATE, AudioUtterance
from cpcr.signal.dsp import apply_fir, fir_lowpass

RMS_TARGET = 0.12  # per-symbol loudness before domain gain


@dataclass
class SymbolSpec:
    char: str
    formants_hz: tuple[float, ...]
    formant_amps: tuple[float, ...]
    duration_range_s: tuple[float, float]
    ramp_s: float = 0.008

    def __post_init__(self) -> None:
        lo, hi = self.duration_range_s
        if lo <= 0 or hi < lo:
            raise ValueError("symbol durations must be positive and ordered")


@dataclass
class LanguageSpec:
    name: str
    symbols: list[SymbolSpec]
    space_range_s: tuple[float, float] = (0.04, 0.07)

    def __post_init__(self) -> None:
        if len(self.symbols) < 2:
            raise ValueError(f"language '{self.name}' needs an inventory of >= 2 symbols")

    @property
    def chars(self) -> str:
        return "".join(s.char for s in self.symbols)

    @classmethod
    def generate(
        cls,
        name: str,
        inventory_size: int,
        seed: int,
        duration_range_s: tuple[float, float] = (0.06, 0.11),
        freq_range_hz: tuple[float, float] = (250.0, 5500.0),
    ) -> "LanguageSpec":
        """Draw a per-language symbol inventory from the (seed, name) stream."""
        if inventory_size < 2:
            raise ValueError("inventory_size must be >= 2")
        rng = derive_rng(seed, "language", name)
        symbols = []
        for i in range(inventory_size):
            n_formants = int(rng.integers(2, 4))
            freqs = tuple(float(f) for f in sorted(rng.uniform(*freq_range_hz, size=n_formants)))
            amps = tuple(float(a) for a in rng.uniform(0.4, 1.0, size=n_formants))
            lo = float(rng.uniform(duration_range_s[0], (duration_range_s[0] + duration_range_s[1]) / 2))
            hi = float(rng.uniform(lo + 0.01, duration_range_s[1] + 0.01))
            symbols.append(
                SymbolSpec(
                    char=chr(ord("a") + i),
                    formants_hz=freqs,
                    formant_amps=amps,
                    duration_range_s=(lo, hi),
                )
            )
        return cls(name=name, symbols=symbols)


@dataclass
class DomainSpec:
    """Perturbation recipe; neutral values make every stage a bit-exact no-op."""

    name: str
    snr_db: float | None = None  # None = noise-free
    lowpass_hz: float | None = None
    gain_range: tuple[float, float] = (1.0, 1.0)
    pitch_range: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self) -> None:
        if self.snr_db is not None and not np.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite (use None for noise-free)")


@dataclass
class CorpusSpec:
    """One corpus: a language voiced under one domain, with sizing and a seed."""

    name: str
    language: LanguageSpec
    domain: DomainSpec
    utterance_count: int
    seed: int
    words_range: tuple[int, int] = (2, 3)
    word_length_range: tuple[int, int] = (2, 4)
    index_start: int = 0

    def __post_init__(self) -> None:
        if self.utterance_count < 1:
            raise ValueError("utterance_count must be >= 1")
        if self.words_range[0] < 1 or self.word_length_range[0] < 1:
            raise ValueError("transcript length ranges must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CorpusSpec":
        d = dict(d)
        lang = d["language"]
        d["language"] = LanguageSpec(
            name=lang["name"],
            symbols=[SymbolSpec(**{**s, "formants_hz": tuple(s["formants_hz"]),
                                   "formant_amps": tuple(s["formant_amps"]),
                                   "duration_range_s": tuple(s["duration_range_s"])})
                     for s in lang["symbols"]],
            space_range_s=tuple(lang["space_range_s"]),
        )
        dom = dict(d["domain"])
        dom["gain_range"] = tuple(dom["gain_range"])
        dom["pitch_range"] = tuple(dom["pitch_range"])
        d["domain"] = DomainSpec(**dom)
        d["words_range"] = tuple(d["words_range"])
        d["word_length_range"] = tuple(d["word_length_range"])
        return cls(**d)


def _tone_complex(sym: SymbolSpec, duration_s: float, phases: np.ndarray, rate: int) -> np.ndarray:
    n = max(8, int(round(duration_s * rate)))
    t = np.arange(n) / rate
    x = np.zeros(n)
    for f, a, ph in zip(sym.formants_hz, sym.formant_amps, phases):
        x += a * np.sin(2.0 * np.pi * f * t + ph)
    ramp = min(int(sym.ramp_s * rate), n // 2)
    if ramp > 0:
        env = np.ones(n)
        fade = 0.5 - 0.5 * np.cos(np.pi * np.arange(ramp) / ramp)
        env[:ramp] = fade
        env[-ramp:] = fade[::-1]
        x *= env
    rms = np.sqrt(np.mean(x**2))
    if rms > 0:
        x *= RMS_TARGET / rms
    return x


def _clean_utterance(spec: CorpusSpec, index: int, rate: int) -> tuple[str, np.ndarray]:
    """Transcript and clean waveform; domain-independent by construction."""
    rng = derive_rng(spec.seed, "clean", spec.language.name, index)
    words = []
    n_words = int(rng.integers(spec.words_range[0], spec.words_range[1] + 1))
    for _ in range(n_words):
        length = int(rng.integers(spec.word_length_range[0], spec.word_length_range[1] + 1))
        idx = rng.integers(0, len(spec.language.symbols), size=length)
        words.append("".join(spec.language.symbols[i].char for i in idx))
    transcript = " ".join(words)

    by_char = {s.char: s for s in spec.language.symbols}
    pieces = []
    for ch in transcript:
        if ch == " ":
            gap = rng.uniform(*spec.language.space_range_s)
            pieces.append(np.zeros(int(round(gap * rate))))
        else:
            sym = by_char[ch]
            duration = rng.uniform(*sym.duration_range_s)
            phases = rng.uniform(0, 2 * np.pi, size=len(sym.formants_hz))
            pieces.append(_tone_complex(sym, duration, phases, rate))
    margin = np.zeros(int(0.02 * rate))
    return transcript, np.concatenate([margin] + pieces + [margin])


def _perturb(x: np.ndarray, domain: DomainSpec, rng: np.random.Generator, rate: int) -> np.ndarray:
    if domain.pitch_range != (1.0, 1.0):
        factor = rng.uniform(*domain.pitch_range)
        positions = np.arange(0, x.size - 1, factor)
        x = np.interp(positions, np.arange(x.size), x)
    if domain.lowpass_hz is not None:
        x = apply_fir(x, fir_lowpass(domain.lowpass_hz, sample_rate=rate))
    if domain.gain_range != (1.0, 1.0):
        x = x * rng.uniform(*domain.gain_range)
    if domain.snr_db is not None:
        noise = rng.standard_normal(x.size)
        sig_power = np.mean(x**2)
        noise_power = np.mean(noise**2)
        target = sig_power / (10.0 ** (domain.snr_db / 10.0))
        x = x + noise * np.sqrt(target / noise_power)
    return x


def synth_utterance(spec: CorpusSpec, index: int, rate: int = SAMPLE_RATE) -> AudioUtterance:
    transcript, clean = _clean_utterance(spec, index, rate)
    rng = derive_rng(spec.seed, "domain", spec.domain.name, spec.language.name, index)
    samples = _perturb(clean, spec.domain, rng, rate)
    return AudioUtterance(
        samples=samples.astype(np.float32),
        utterance_id=f"{spec.language.name}-{spec.domain.name}-{index:05d}",
        transcript=transcript,
        language=spec.language.name,
        domain=spec.domain.name,
    )


def synth_corpus(spec: CorpusSpec, rate: int = SAMPLE_RATE) -> list[AudioUtterance]:
    """All utterances of the corpus, ordered by index; bit-identical per (spec, seed)."""
    return [synth_utterance(spec, spec.index_start + i, rate) for i in range(spec.utterance_count)]
