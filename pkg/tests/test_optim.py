import numpy as np
import pytest

from cpcr import numcore as nc
from cpcr.numcore import NumericsError


def _params(values):
    return {k: nc.Tensor(np.asarray(v, dtype=np.float64), requires_grad=True) for k, v in values.items()}


class TestAdam:
    def test_zero_gradient_leaves_params(self):
        params = _params({"w": [1.0, -2.0]})
        state = nc.adam_init(params)
        nc.adam_step(params, {"w": np.zeros(2)}, state, lr=0.1)
        np.testing.assert_array_equal(params["w"].data, [1.0, -2.0])
        assert state.step == 1

    def test_first_step_is_minus_lr(self):
        # g=1 with defaults: bias-corrected m_hat=1, v_hat=1 -> delta ~ -lr
        params = _params({"w": [0.0]})
        state = nc.adam_init(params)
        nc.adam_step(params, {"w": np.array([1.0])}, state, lr=0.01)
        assert abs(params["w"].data[0] + 0.01) <= 1e-9

    def test_zero_lr_updates_moments_only(self):
        params = _params({"w": [3.0]})
        state = nc.adam_init(params)
        nc.adam_step(params, {"w": np.array([2.0])}, state, lr=0.0)
        np.testing.assert_array_equal(params["w"].data, [3.0])
        assert state.m["w"][0] != 0.0 and state.v["w"][0] != 0.0

    def test_nonfinite_gradient_rejected(self):
        params = _params({"w": [0.0]})
        state = nc.adam_init(params)
        with pytest.raises(NumericsError):
            nc.adam_step(params, {"w": np.array([np.nan])}, state, lr=0.1)

    def test_step_counter_strictly_increases(self):
        params = _params({"w": [0.0]})
        state = nc.adam_init(params)
        for expected in (1, 2, 3):
            nc.adam_step(params, {"w": np.array([1.0])}, state, lr=1e-3)
            assert state.step == expected


class TestClipGlobalNorm:
    def test_halves_when_norm_doubles_cap(self):
        grads = {"a": np.array([6.0, 8.0])}  # norm 10
        clipped, norm = nc.clip_global_norm(grads, 5.0)
        assert norm == pytest.approx(10.0)
        np.testing.assert_allclose(clipped["a"], [3.0, 4.0])

    def test_under_cap_untouched(self):
        g = np.array([3.0])
        clipped, norm = nc.clip_global_norm({"a": g}, 5.0)
        assert clipped["a"] is g
        assert norm == pytest.approx(3.0)

    def test_direction_preserved(self):
        rng = np.random.default_rng(0)
        g = rng.normal(size=16)
        clipped, _ = nc.clip_global_norm({"a": g.copy() * 100}, 1.0)
        unit_before = g / np.linalg.norm(g)
        unit_after = clipped["a"] / np.linalg.norm(clipped["a"])
        np.testing.assert_allclose(unit_before, unit_after, atol=1e-12)

    def test_idempotent_bitwise(self):
        rng = np.random.default_rng(1)
        grads = {"a": rng.normal(size=32) * 10, "b": rng.normal(size=(2, 3))}
        once, _ = nc.clip_global_norm({k: v.copy() for k, v in grads.items()}, 2.0)
        twice, _ = nc.clip_global_norm({k: v.copy() for k, v in once.items()}, 2.0)
        for k in grads:
            assert np.array_equal(once[k], twice[k])

    def test_result_within_bound(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            grads = {"a": rng.normal(size=64).astype(np.float32) * rng.uniform(0, 20)}
            clipped, _ = nc.clip_global_norm(grads, 5.0)
            _, norm_after = nc.clip_global_norm({k: v.copy() for k, v in clipped.items()}, 5.0)
            assert norm_after <= 5.0 + 1e-6


class TestSchedule:
    def test_polynomial_midpoint(self):
        s = nc.LrSchedule(kind="polynomial", base=1e-4, power=2.0, total_steps=1000, end=0.0)
        assert nc.schedule_rate(s, 500) == pytest.approx(2.5e-5)

    def test_endpoints(self):
        s = nc.LrSchedule(kind="polynomial", base=1e-4, power=2.0, total_steps=100, end=1e-6)
        assert nc.schedule_rate(s, 0) == pytest.approx(1e-4)
        assert nc.schedule_rate(s, 100) == pytest.approx(1e-6)
        assert nc.schedule_rate(s, 250) == pytest.approx(1e-6)  # clamps past total

    def test_monotone_nonincreasing_and_bounded(self):
        s = nc.LrSchedule(kind="polynomial", base=3e-4, power=2.0, total_steps=57, end=0.0)
        rates = [nc.schedule_rate(s, i) for i in range(58)]
        assert all(r >= 0 for r in rates)
        assert all(a >= b for a, b in zip(rates, rates[1:]))
        assert max(rates) <= s.base

    def test_constant(self):
        s = nc.LrSchedule(kind="constant", base=2e-4)
        assert nc.schedule_rate(s, 12345) == 2e-4

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            nc.LrSchedule(kind="cosine")
