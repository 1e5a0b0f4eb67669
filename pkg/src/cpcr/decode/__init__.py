"""CTC decoding (greedy, prefix beam search with optional char LM) and metrics."""

from cpcr.decode.metrics import EditCounts, cer, edit_distance, wer
from cpcr.decode.lm import CharNgramLm, lm_score, train_char_lm
from cpcr.decode.search import DecodeResult, greedy_ctc_decode, prefix_beam_search

__all__ = [
    "CharNgramLm",
    "DecodeResult",
    "EditCounts",
    "cer",
    "edit_distance",
    "greedy_ctc_decode",
    "lm_score",
    "prefix_beam_search",
    "train_char_lm",
    "wer",
]
