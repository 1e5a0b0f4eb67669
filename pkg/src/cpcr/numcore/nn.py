"""Neural-network kernels: causal convolutions, layer norm, GRU, linear, init."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cpcr.numcore.tensor import Tensor, accumulate, concat, make_op, sigmoid, tanh


def conv_out_len(length: int, stride: int) -> int:
    """Output frame count under causal padding: ceil(length / stride)."""
    return -(-length // stride)


def kaiming_uniform(shape: tuple[int, ...], fan_in: int, rng: np.random.Generator, dtype=np.float32) -> np.ndarray:
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


def _im2col_1d(xp: np.ndarray, kernel: int, stride: int, t_out: int) -> np.ndarray:
    """View (B, C, T_pad) as (B, C, kernel, t_out) sliding windows, then copy."""
    b, c, _ = xp.shape
    sb, sc, st = xp.strides
    view = np.lib.stride_tricks.as_strided(
        xp, shape=(b, c, kernel, t_out), strides=(sb, sc, st, st * stride), writeable=False
    )
    return np.ascontiguousarray(view)


def conv1d_causal(x: Tensor, weights: Tensor, bias: Tensor | None, stride: int = 1) -> Tensor:
    """Causal 1-d convolution.

    `x` is (channels_in, T) or batched (B, channels_in, T); `weights` is
    (channels_out, channels_in, kernel). The input is left-padded with
    kernel-1 zeros so output frame t depends only on inputs <= t*stride,
    and T_out = ceil(T / stride).
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    squeeze = x.ndim == 2
    xd = x.data[None] if squeeze else x.data
    if xd.ndim != 3:
        raise ValueError(f"conv1d_causal expects 2-d or 3-d input, got shape {x.shape}")
    b, c_in, t = xd.shape
    c_out, wc_in, kernel = weights.shape
    if wc_in != c_in:
        raise ValueError(f"input has {c_in} channels but weights expect {wc_in}")
    if kernel < 1 or t < 1:
        raise ValueError("kernel and input length must be >= 1")

    t_out = conv_out_len(t, stride)
    xp = np.pad(xd, ((0, 0), (0, 0), (kernel - 1, 0)))
    col = _im2col_1d(xp, kernel, stride, t_out).reshape(b, c_in * kernel, t_out)
    w2 = weights.data.reshape(c_out, c_in * kernel)
    out = w2 @ col
    if bias is not None:
        out = out + bias.data.reshape(1, c_out, 1)
    if squeeze:
        out = out[0]

    parents = (x, weights) if bias is None else (x, weights, bias)

    def backward(o) -> None:
        g = o.grad[None] if squeeze else o.grad
        gw = np.matmul(g, np.swapaxes(col, 1, 2)).sum(axis=0)
        accumulate(weights, gw.reshape(weights.shape))
        if bias is not None:
            accumulate(bias, g.sum(axis=(0, 2)))
        if x.requires_grad:
            gcol = np.matmul(w2.T, g).reshape(b, c_in, kernel, t_out)
            gxp = np.zeros_like(xp)
            for j in range(kernel):
                gxp[:, :, j : j + stride * t_out : stride] += gcol[:, :, j, :]
            gx = gxp[:, :, kernel - 1 :]
            accumulate(x, gx[0] if squeeze else gx)

    return make_op(out, parents, backward)


def conv2d(x: Tensor, weights: Tensor, bias: Tensor | None, strides: tuple[int, int]) -> Tensor:
    """2-d convolution over (B, C_in, T, F): causal padding in time, SAME in frequency.

    Output is (B, C_out, ceil(T/st), ceil(F/sf)).
    """
    st, sf = strides
    b, c_in, t, f = x.shape
    c_out, wc_in, kt, kf = weights.shape
    if wc_in != c_in:
        raise ValueError(f"input has {c_in} channels but weights expect {wc_in}")
    if kf > f:
        raise ValueError(f"frequency kernel {kf} exceeds feature dim {f}")
    t_out = conv_out_len(t, st)
    f_out = conv_out_len(f, sf)
    pad_f = max(0, (f_out - 1) * sf + kf - f)
    pf_lo = pad_f // 2
    xp = np.pad(x.data, ((0, 0), (0, 0), (kt - 1, 0), (pf_lo, pad_f - pf_lo)))
    sb, sc, stt, sff = xp.strides
    view = np.lib.stride_tricks.as_strided(
        xp,
        shape=(b, c_in, kt, kf, t_out, f_out),
        strides=(sb, sc, stt, sff, stt * st, sff * sf),
        writeable=False,
    )
    col = np.ascontiguousarray(view).reshape(b, c_in * kt * kf, t_out * f_out)
    w2 = weights.data.reshape(c_out, c_in * kt * kf)
    out = (w2 @ col).reshape(b, c_out, t_out, f_out)
    if bias is not None:
        out = out + bias.data.reshape(1, c_out, 1, 1)

    parents = (x, weights) if bias is None else (x, weights, bias)

    def backward(o) -> None:
        g = o.grad.reshape(b, c_out, t_out * f_out)
        gw = np.matmul(g, np.swapaxes(col, 1, 2)).sum(axis=0)
        accumulate(weights, gw.reshape(weights.shape))
        if bias is not None:
            accumulate(bias, o.grad.sum(axis=(0, 2, 3)))
        if x.requires_grad:
            gcol = np.matmul(w2.T, g).reshape(b, c_in, kt, kf, t_out, f_out)
            gxp = np.zeros_like(xp)
            for jt in range(kt):
                for jf in range(kf):
                    gxp[:, :, jt : jt + st * t_out : st, jf : jf + sf * f_out : sf] += gcol[:, :, jt, jf]
            accumulate(x, gxp[:, :, kt - 1 :, pf_lo : pf_lo + f])

    return make_op(out, parents, backward)


def layer_norm(x: Tensor, gain: Tensor, shift: Tensor, axes: tuple[int, ...] | None = None, eps: float = 1e-5) -> Tensor:
    """Normalize jointly over `axes` to zero mean / unit variance, then affine.

    Default axes: both axes of a (C, T) input, or all non-batch axes of a
    batched input. `gain`/`shift` must broadcast against x (per-channel
    (C, 1) in the convolutional stacks).
    """
    if axes is None:
        axes = (0, 1) if x.ndim == 2 else tuple(range(1, x.ndim))
    mu = x.data.mean(axis=axes, keepdims=True)
    var = x.data.var(axis=axes, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv
    out = xhat * gain.data + shift.data
    n = 1
    for ax in axes:
        n *= x.shape[ax]

    def backward(o) -> None:
        g = o.grad
        accumulate(gain, g * xhat)
        accumulate(shift, g)
        if x.requires_grad:
            gy = g * gain.data
            m1 = gy.mean(axis=axes, keepdims=True)
            m2 = (gy * xhat).mean(axis=axes, keepdims=True)
            accumulate(x, inv * (gy - m1 - xhat * m2))

    return make_op(out, (x, gain, shift), backward)


def linear(x: Tensor, weights: Tensor, bias: Tensor | None = None) -> Tensor:
    """Affine map: weights @ x (+ bias), with x column-major (d_in, T)."""
    out = weights @ x
    if bias is not None:
        out = out + bias
    return out


@dataclass
class GruParams:
    """Gate parameters, each W* of shape (d_h, d_in) / (d_h, d_h), biases (d_h, 1)."""

    wxr: Tensor
    whr: Tensor
    br: Tensor
    wxu: Tensor
    whu: Tensor
    bu: Tensor
    wxn: Tensor
    whn: Tensor
    bn: Tensor

    def tensors(self) -> dict[str, Tensor]:
        return {k: getattr(self, k) for k in ("wxr", "whr", "br", "wxu", "whu", "bu", "wxn", "whn", "bn")}


def gru_init(d_in: int, d_h: int, rng: np.random.Generator, dtype=np.float32) -> GruParams:
    def w(shape, fan):
        return Tensor(kaiming_uniform(shape, fan, rng, dtype), requires_grad=True)

    def b():
        return Tensor(np.zeros((d_h, 1), dtype=dtype), requires_grad=True)

    return GruParams(
        wxr=w((d_h, d_in), d_in), whr=w((d_h, d_h), d_h), br=b(),
        wxu=w((d_h, d_in), d_in), whu=w((d_h, d_h), d_h), bu=b(),
        wxn=w((d_h, d_in), d_in), whn=w((d_h, d_h), d_h), bn=b(),
    )


def gru_sequence(x: Tensor, params: GruParams) -> Tensor:
    """Left-to-right GRU over (d_in, T) with zero initial state; returns (d_h, T).

    Recurrence: r = sig(Wxr x + Whr h + br), u = sig(Wxu x + Whu h + bu),
    n = tanh(Wxn x + r * (Whn h) + bn), h' = (1 - u) * n + u * h.
    """
    d_in, t_len = x.shape
    if params.wxr.shape[1] != d_in:
        raise ValueError(f"input dim {d_in} does not match GRU input dim {params.wxr.shape[1]}")
    h = Tensor(np.zeros((params.whr.shape[0], 1), dtype=x.dtype))
    outputs = []
    for t in range(t_len):
        xt = x[:, t : t + 1]
        r = sigmoid(params.wxr @ xt + params.whr @ h + params.br)
        u = sigmoid(params.wxu @ xt + params.whu @ h + params.bu)
        n = tanh(params.wxn @ xt + r * (params.whn @ h) + params.bn)
        h = (1.0 - u) * n + u * h
        outputs.append(h)
    return concat(outputs, axis=1)
