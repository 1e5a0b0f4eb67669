"""Audio I/O, input normalization, baseline features, and synthetic corpora."""

from cpcr.signal.audio import SAMPLE_RATE, AudioUtterance, normalize_utterance, random_crop
from cpcr.signal.wav import WavFormatError, read_wav, write_wav
from cpcr.signal.dsp import (
    FeatureFrames,
    fft_radix2,
    fir_lowpass,
    hann_window,
    log_filterbank,
    mel_filterbank_weights,
    spectrogram,
)
from cpcr.signal.corpus import (
    CorpusSpec,
    DomainSpec,
    LanguageSpec,
    SymbolSpec,
    synth_corpus,
    synth_utterance,
)

__all__ = [
    "AudioUtterance",
    "CorpusSpec",
    "DomainSpec",
    "FeatureFrames",
    "LanguageSpec",
    "SAMPLE_RATE",
    "SymbolSpec",
    "WavFormatError",
    "fft_radix2",
    "fir_lowpass",
    "hann_window",
    "log_filterbank",
    "mel_filterbank_weights",
    "normalize_utterance",
    "random_crop",
    "read_wav",
    "spectrogram",
    "synth_corpus",
    "synth_utterance",
    "write_wav",
]
