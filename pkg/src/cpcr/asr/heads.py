"""Recognition heads: a small DeepSpeech2-style conv+GRU model and a TDNN stack.

Both map a feature matrix (dim x frames) to per-frame log-probabilities over
the character vocabulary plus blank. The DS2 head halves the time axis with
its first conv stride; the TDNN preserves the frame count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from cpcr import numcore as nc
from cpcr.asr.ctc import FramePosteriors
from cpcr.signal.dsp import FeatureFrames

logger = logging.getLogger(__name__)


@dataclass
class Ds2SmallConfig:
    """Two 2-d convolutions, one unidirectional GRU, and an output affine."""

    input_dim: int
    num_classes: int
    conv_channels: tuple[int, int] = (8, 16)
    kernels: tuple[tuple[int, int], tuple[int, int]] = ((11, 41), (11, 21))
    strides: tuple[tuple[int, int], tuple[int, int]] = ((2, 2), (1, 2))
    gru_hidden: int = 64

    def effective_kernels(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Frequency kernels clamp to the running feature dim when it is smaller."""
        dims = self.freq_dims()
        out = []
        for (kt, kf), f_in in zip(self.kernels, dims[:-1]):
            if kf > f_in:
                logger.warning(
                    "frequency kernel %d exceeds feature dim %d; clamping to %d", kf, f_in, f_in
                )
                kf = f_in
            out.append((kt, kf))
        return tuple(out)

    def freq_dims(self) -> list[int]:
        dims = [self.input_dim]
        for (_, sf) in self.strides:
            dims.append(-(-dims[-1] // sf))
        return dims


@dataclass
class TdnnConfig:
    """17 1-d convolution layers, 2 fully connected layers, output affine."""

    input_dim: int
    num_classes: int
    channels: int = 32
    conv_layers: int = 17
    kernel: int = 5
    fc_dim: int = 64


def ds2_init(cfg: Ds2SmallConfig, rng: np.random.Generator, dtype=np.float32) -> dict[str, nc.Tensor]:
    kernels = cfg.effective_kernels()
    c1, c2 = cfg.conv_channels
    params: dict[str, nc.Tensor] = {}

    def par(name, arr):
        params[name] = nc.Tensor(arr, requires_grad=True)

    (kt1, kf1), (kt2, kf2) = kernels
    par("conv1.w", nc.kaiming_uniform((c1, 1, kt1, kf1), kt1 * kf1, rng, dtype))
    par("conv1.b", np.zeros(c1, dtype=dtype))
    par("conv2.w", nc.kaiming_uniform((c2, c1, kt2, kf2), c1 * kt2 * kf2, rng, dtype))
    par("conv2.b", np.zeros(c2, dtype=dtype))
    flat = c2 * cfg.freq_dims()[-1]
    gru = nc.gru_init(flat, cfg.gru_hidden, rng, dtype)
    for k, t in gru.tensors().items():
        params[f"gru.{k}"] = t
    par("out.w", nc.kaiming_uniform((cfg.num_classes, cfg.gru_hidden), cfg.gru_hidden, rng, dtype))
    par("out.b", np.zeros((cfg.num_classes, 1), dtype=dtype))
    return params


def ds2_forward(features: np.ndarray, cfg: Ds2SmallConfig, params: dict[str, nc.Tensor]) -> nc.Tensor:
    """(dim x T) features -> (ceil(T/2) x num_classes) log-probabilities."""
    feats = np.asarray(features)
    if feats.shape[0] != cfg.input_dim:
        raise ValueError(f"feature dim {feats.shape[0]} does not match head input dim {cfg.input_dim}")
    x = nc.Tensor(feats.T[None, None])  # (1, 1, T, F)
    x = nc.conv2d(x, params["conv1.w"], params["conv1.b"], strides=cfg.strides[0]).relu()
    x = nc.conv2d(x, params["conv2.w"], params["conv2.b"], strides=cfg.strides[1]).relu()
    _, c2, t_out, f_out = x.shape
    x = x.transpose((0, 2, 1, 3)).reshape(t_out, c2 * f_out)  # (T', C*F)
    gru = nc.GruParams(**{k.split(".", 1)[1]: v for k, v in params.items() if k.startswith("gru.")})
    h = nc.gru_sequence(x.T, gru)  # (H, T')
    logits = params["out.w"] @ h + params["out.b"]  # (classes, T')
    return logits.T.log_softmax(axis=1)


def tdnn_init(cfg: TdnnConfig, rng: np.random.Generator, dtype=np.float32) -> dict[str, nc.Tensor]:
    params: dict[str, nc.Tensor] = {}

    def par(name, arr, grad=True):
        params[name] = nc.Tensor(arr, requires_grad=grad)

    d_in = cfg.input_dim
    for i in range(cfg.conv_layers):
        par(f"conv{i}.w", nc.kaiming_uniform((cfg.channels, d_in, cfg.kernel), d_in * cfg.kernel, rng, dtype))
        par(f"conv{i}.b", np.zeros(cfg.channels, dtype=dtype))
        par(f"conv{i}.g", np.ones((cfg.channels, 1), dtype=dtype))
        par(f"conv{i}.s", np.zeros((cfg.channels, 1), dtype=dtype))
        d_in = cfg.channels
    for j, (din, dout) in enumerate([(cfg.channels, cfg.fc_dim), (cfg.fc_dim, cfg.fc_dim)]):
        par(f"fc{j}.w", nc.kaiming_uniform((dout, din), din, rng, dtype))
        par(f"fc{j}.b", np.zeros((dout, 1), dtype=dtype))
    par("out.w", nc.kaiming_uniform((cfg.num_classes, cfg.fc_dim), cfg.fc_dim, rng, dtype))
    par("out.b", np.zeros((cfg.num_classes, 1), dtype=dtype))
    return params


def tdnn_forward(features: np.ndarray, cfg: TdnnConfig, params: dict[str, nc.Tensor]) -> nc.Tensor:
    """(dim x T) features -> (T x num_classes) log-probabilities (frame count preserved)."""
    feats = np.asarray(features)
    if feats.shape[0] != cfg.input_dim:
        raise ValueError(f"feature dim {feats.shape[0]} does not match head input dim {cfg.input_dim}")
    x = nc.Tensor(feats)
    for i in range(cfg.conv_layers):
        x = nc.conv1d_causal(x, params[f"conv{i}.w"], params[f"conv{i}.b"], stride=1)
        x = nc.layer_norm(x, params[f"conv{i}.g"], params[f"conv{i}.s"]).relu()
    for j in range(2):
        x = (params[f"fc{j}.w"] @ x + params[f"fc{j}.b"]).relu()
    logits = params["out.w"] @ x + params["out.b"]
    return logits.T.log_softmax(axis=1)


def head_init(cfg: Ds2SmallConfig | TdnnConfig, rng: np.random.Generator, dtype=np.float32) -> dict[str, nc.Tensor]:
    if isinstance(cfg, Ds2SmallConfig):
        return ds2_init(cfg, rng, dtype)
    return tdnn_init(cfg, rng, dtype)


def head_logits(features: np.ndarray, cfg: Ds2SmallConfig | TdnnConfig, params: dict[str, nc.Tensor]) -> nc.Tensor:
    if isinstance(cfg, Ds2SmallConfig):
        return ds2_forward(features, cfg, params)
    return tdnn_forward(features, cfg, params)


def head_forward(
    features: FeatureFrames | np.ndarray,
    cfg: Ds2SmallConfig | TdnnConfig,
    params: dict[str, nc.Tensor],
) -> FramePosteriors:
    """Inference entry point: returns validated frame posteriors (no graph)."""
    feats = features.frames if isinstance(features, FeatureFrames) else features
    with nc.no_grad():
        out = head_logits(feats, cfg, params)
    return FramePosteriors(log_probs=out.data)
