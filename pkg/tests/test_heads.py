import logging

import numpy as np
import pytest

from cpcr.asr import (
    Ds2SmallConfig,
    TdnnConfig,
    ds2_forward,
    ds2_init,
    head_forward,
    tdnn_forward,
    tdnn_init,
)
from cpcr.rng import derive_rng


class TestDs2Small:
    def test_rows_are_normalized_log_probs(self):
        cfg = Ds2SmallConfig(input_dim=40, num_classes=7)
        params = ds2_init(cfg, derive_rng(0, "t"))
        feats = np.random.default_rng(1).normal(size=(40, 12)).astype(np.float32)
        out = ds2_forward(feats, cfg, params)
        sums = np.log(np.exp(out.data).sum(axis=1))
        assert np.max(np.abs(sums)) <= 1e-5

    def test_time_axis_halved_ceil(self):
        cfg = Ds2SmallConfig(input_dim=40, num_classes=5)
        params = ds2_init(cfg, derive_rng(2, "t"))
        for t_in, t_out in ((10, 5), (11, 6), (1, 1)):
            feats = np.zeros((40, t_in), dtype=np.float32)
            assert ds2_forward(feats, cfg, params).shape == (t_out, 5)

    def test_zero_params_uniform_posteriors(self):
        cfg = Ds2SmallConfig(input_dim=24, num_classes=6)
        params = ds2_init(cfg, derive_rng(3, "t"))
        for p in params.values():
            p.data[...] = 0.0
        out = ds2_forward(np.ones((24, 8), dtype=np.float32), cfg, params)
        np.testing.assert_allclose(out.data, np.log(1.0 / 6.0), atol=1e-6)

    def test_frequency_kernel_clamps_with_warning(self, caplog):
        cfg = Ds2SmallConfig(input_dim=16, num_classes=4)
        with caplog.at_level(logging.WARNING):
            eff = cfg.effective_kernels()
        assert eff[0] == (11, 16)
        assert any("clamping" in rec.message for rec in caplog.records)

    def test_feature_dim_mismatch(self):
        cfg = Ds2SmallConfig(input_dim=40, num_classes=4)
        params = ds2_init(cfg, derive_rng(4, "t"))
        with pytest.raises(ValueError, match="dim"):
            ds2_forward(np.zeros((39, 10), dtype=np.float32), cfg, params)

    def test_head_forward_returns_posteriors(self):
        cfg = Ds2SmallConfig(input_dim=12, num_classes=4, conv_channels=(2, 3), gru_hidden=5)
        params = ds2_init(cfg, derive_rng(5, "t"))
        post = head_forward(np.random.default_rng(6).normal(size=(12, 9)).astype(np.float32), cfg, params)
        assert post.num_frames == 5 and post.num_classes == 4


class TestTdnn:
    def test_layer_count_and_frame_preservation(self):
        cfg = TdnnConfig(input_dim=20, num_classes=5, channels=8, kernel=3, fc_dim=8)
        params = tdnn_init(cfg, derive_rng(7, "t"))
        conv_weights = [k for k in params if k.startswith("conv") and k.endswith(".w")]
        fc_weights = [k for k in params if k.startswith("fc") and k.endswith(".w")]
        assert len(conv_weights) == 17 and len(fc_weights) == 2
        out = tdnn_forward(np.random.default_rng(8).normal(size=(20, 13)).astype(np.float32), cfg, params)
        assert out.shape == (13, 5)
        sums = np.log(np.exp(out.data).sum(axis=1))
        assert np.max(np.abs(sums)) <= 1e-5

    def test_zero_params_uniform(self):
        cfg = TdnnConfig(input_dim=6, num_classes=3, channels=4, kernel=3, fc_dim=4)
        params = tdnn_init(cfg, derive_rng(9, "t"))
        for p in params.values():
            p.data[...] = 0.0
        out = tdnn_forward(np.ones((6, 5), dtype=np.float32), cfg, params)
        np.testing.assert_allclose(out.data, np.log(1.0 / 3.0), atol=1e-6)
