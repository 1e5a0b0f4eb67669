"""Supervised CTC training over frozen features with dev-WER early stopping."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from cpcr import numcore as nc
from cpcr.asr.ctc import CtcLengthError, ctc_loss
from cpcr.asr.heads import Ds2SmallConfig, TdnnConfig, head_init, head_logits
from cpcr.asr.vocab import CharVocab
from cpcr.decode.metrics import edit_distance
from cpcr.decode.search import greedy_ctc_decode
from cpcr.rng import derive_rng

logger = logging.getLogger(__name__)


@dataclass
class AsrOptimConfig:
    """Optimizer recipe; defaults follow the small-head settings (fixed 2e-4, clip 25).

    TDNN-style training uses clip 5.0 with a polynomial power-2 schedule over
    the full step budget; `for_head` picks the right recipe.
    """

    lr: float = 2e-4
    clip_norm: float = 25.0
    schedule: str = "constant"  # "constant" | "polynomial"
    power: float = 2.0
    batch_size: int = 4
    max_epochs: int = 200
    eval_every_epochs: int = 1
    patience: int = 10

    @classmethod
    def for_head(cls, head_cfg, **overrides) -> "AsrOptimConfig":
        if isinstance(head_cfg, TdnnConfig):
            base = cls(lr=2e-4, clip_norm=5.0, schedule="polynomial")
        else:
            base = cls(lr=2e-4, clip_norm=25.0, schedule="constant")
        for k, v in overrides.items():
            setattr(base, k, v)
        return base


@dataclass
class TrainResult:
    params: dict[str, nc.Tensor]
    log: list[dict]
    best_dev_wer: float
    skipped_utterances: int


def corpus_error_rate(refs: Sequence[str], hyps: Sequence[str], unit: str = "word") -> float:
    """Corpus-level rate: total edit distance / total reference length."""
    total_err = 0
    total_len = 0
    for ref, hyp in zip(refs, hyps):
        r = ref.split() if unit == "word" else list(ref)
        h = hyp.split() if unit == "word" else list(hyp)
        total_err += edit_distance(r, h).distance
        total_len += len(r)
    if total_len == 0:
        raise ValueError("empty reference corpus")
    return total_err / total_len


def evaluate_wer(
    dev_set: Sequence[tuple[np.ndarray, str]],
    head_cfg,
    params: dict[str, nc.Tensor],
    vocab: CharVocab,
) -> float:
    refs, hyps = [], []
    with nc.no_grad():
        for feats, transcript in dev_set:
            post = head_logits(feats, head_cfg, params)
            hyps.append(greedy_ctc_decode(post.data, vocab.as_string()).text)
            refs.append(transcript)
    return corpus_error_rate(refs, hyps, unit="word")


def train_asr(
    train_set: Sequence[tuple[np.ndarray, str]],
    dev_set: Sequence[tuple[np.ndarray, str]],
    head_cfg: Ds2SmallConfig | TdnnConfig,
    vocab: CharVocab,
    optim: AsrOptimConfig,
    seed: int,
    log_sink: Callable[[dict], None] | None = None,
) -> TrainResult:
    """Maximize CTC log-likelihood of the training set; stop on dev-WER plateau.

    Feature extractors are frozen by construction: `train_set` holds plain
    arrays with no gradient path back to whatever produced them. Utterances
    whose labels cannot fit their frame count are skipped and counted.
    Returns the parameters of the best dev-WER evaluation.
    """
    if not train_set or not dev_set:
        raise ValueError("train and dev sets must be non-empty")
    params = head_init(head_cfg, derive_rng(seed, "head-init"))
    state = nc.adam_init(params)
    steps_per_epoch = max(1, -(-len(train_set) // optim.batch_size))
    schedule = nc.LrSchedule(
        kind=optim.schedule,
        base=optim.lr,
        power=optim.power,
        total_steps=max(1, optim.max_epochs * steps_per_epoch),
    )
    order_rng = derive_rng(seed, "batch-order")

    log: list[dict] = []
    best_wer = float("inf")
    best_params = {k: p.data.copy() for k, p in params.items()}
    evals_since_best = 0
    skipped = 0
    step = 0

    def emit(rec: dict) -> None:
        log.append(rec)
        if log_sink is not None:
            log_sink(rec)

    for epoch in range(1, optim.max_epochs + 1):
        perm = order_rng.permutation(len(train_set))
        epoch_losses = []
        for start in range(0, len(perm), optim.batch_size):
            batch = perm[start : start + optim.batch_size]
            losses = []
            for idx in batch:
                feats, transcript = train_set[idx]
                try:
                    losses.append(ctc_loss(head_logits(feats, head_cfg, params), transcript, vocab))
                except CtcLengthError:
                    skipped += 1
            if not losses:
                continue
            total = losses[0]
            for extra in losses[1:]:
                total = total + extra
            loss = total * (1.0 / len(losses))
            loss.backward()
            grads = {k: p.grad for k, p in params.items() if p.grad is not None}
            grads, _ = nc.clip_global_norm(grads, optim.clip_norm)
            lr = nc.schedule_rate(schedule, step)
            nc.adam_step(params, grads, state, lr)
            for p in params.values():
                p.zero_grad()
            step += 1
            epoch_losses.append(loss.item())

        if epoch % optim.eval_every_epochs == 0:
            dev_wer = evaluate_wer(dev_set, head_cfg, params, vocab)
            emit(
                {
                    "epoch": epoch,
                    "step": step,
                    "loss": float(np.mean(epoch_losses)) if epoch_losses else None,
                    "dev_wer": dev_wer,
                    "lr": nc.schedule_rate(schedule, step),
                }
            )
            if dev_wer < best_wer:
                best_wer = dev_wer
                best_params = {k: p.data.copy() for k, p in params.items()}
                evals_since_best = 0
            else:
                evals_since_best += 1
                if evals_since_best >= optim.patience:
                    logger.info("early stop at epoch %d (dev WER %.4f)", epoch, best_wer)
                    break

    for k, p in params.items():
        p.data = best_params[k]
        p.zero_grad()
    if skipped:
        logger.warning("skipped %d utterances whose labels exceeded their frame budget", skipped)
    return TrainResult(params=params, log=log, best_dev_wer=best_wer, skipped_utterances=skipped)
