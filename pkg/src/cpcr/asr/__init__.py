"""Character-level CTC recognizers over frozen features."""

from cpcr.asr.vocab import CharVocab, VocabError
from cpcr.asr.ctc import CtcLengthError, FramePosteriors, ctc_loss
from cpcr.asr.heads import (
    Ds2SmallConfig,
    TdnnConfig,
    ds2_forward,
    ds2_init,
    head_forward,
    head_init,
    tdnn_forward,
    tdnn_init,
)
from cpcr.asr.train import AsrOptimConfig, train_asr

__all__ = [
    "AsrOptimConfig",
    "CharVocab",
    "CtcLengthError",
    "Ds2SmallConfig",
    "FramePosteriors",
    "TdnnConfig",
    "VocabError",
    "ctc_loss",
    "ds2_forward",
    "ds2_init",
    "head_forward",
    "head_init",
    "tdnn_forward",
    "tdnn_init",
    "train_asr",
]
