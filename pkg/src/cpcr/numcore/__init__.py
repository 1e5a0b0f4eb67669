"""Dense-tensor numerics: reverse-mode autodiff, NN kernels, optimizers, gradient checks."""

from cpcr.numcore.tensor import (
    NumericsError,
    Tensor,
    concat,
    make_op,
    no_grad,
)
from cpcr.numcore.nn import (
    GruParams,
    conv1d_causal,
    conv2d,
    conv_out_len,
    gru_init,
    gru_sequence,
    kaiming_uniform,
    layer_norm,
    linear,
)
from cpcr.numcore.optim import (
    AdamState,
    LrSchedule,
    adam_init,
    adam_step,
    clip_global_norm,
    schedule_rate,
)
from cpcr.numcore.gradcheck import check_gradients, numeric_gradients

__all__ = [
    "AdamState",
    "GruParams",
    "LrSchedule",
    "NumericsError",
    "Tensor",
    "adam_init",
    "adam_step",
    "check_gradients",
    "clip_global_norm",
    "concat",
    "conv1d_causal",
    "conv2d",
    "conv_out_len",
    "gru_init",
    "gru_sequence",
    "kaiming_uniform",
    "layer_norm",
    "linear",
    "make_op",
    "no_grad",
    "numeric_gradients",
    "schedule_rate",
]
