import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from _tiny import fd_grad
from lexnet import nn


def cell_params(rng, d, H, scale=0.5):
    return (rng.normal(scale=scale, size=(4 * H, d)), rng.normal(scale=scale, size=(4 * H, H)),
            rng.normal(scale=scale, size=4 * H))


def reference_step(Wx, Wh, b, x, h, c):
    # Written out gate by gate, independent of the stacked implementation.
    H = h.shape[0]
    logistic = lambda z: 1.0 / (1.0 + math.exp(-z))
    h_new, c_new = np.zeros(H), np.zeros(H)
    for j in range(H):
        pre = [float(Wx[k * H + j] @ x + Wh[k * H + j] @ h + b[k * H + j]) for k in range(4)]
        i, f, o = logistic(pre[0]), logistic(pre[1]), logistic(pre[2])
        g = math.tanh(pre[3])
        c_new[j] = f * c[j] + i * g
        h_new[j] = o * math.tanh(c_new[j])
    return h_new, c_new


class TestCell:
    def test_zero_everything(self):
        H, d = 3, 2
        h, c = nn.cell_step(np.zeros((4 * H, d)), np.zeros((4 * H, H)), np.zeros(4 * H),
                            np.zeros(d), np.zeros(H), np.zeros(H))
        np.testing.assert_array_equal(h, 0)
        np.testing.assert_array_equal(c, 0)

    def test_saturated_gates(self):
        b = np.array([50.0, 50.0, 50.0, 0.0])
        h, c = nn.cell_step(np.zeros((4, 1)), np.zeros((4, 1)), b, np.zeros(1), np.zeros(1), np.ones(1))
        assert c[0] == pytest.approx(1.0, abs=1e-12)
        assert h[0] == pytest.approx(0.7615941559557649, abs=1e-12)

    def test_matches_reference(self):
        rng = np.random.default_rng(3)
        Wx, Wh, b = cell_params(rng, 4, 3)
        x, h, c = rng.normal(size=4), rng.normal(size=3), rng.normal(size=3)
        for got, want in zip(nn.cell_step(Wx, Wh, b, x, h, c), reference_step(Wx, Wh, b, x, h, c)):
            np.testing.assert_allclose(got, want, rtol=0, atol=1e-14)

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            nn.cell_step(np.zeros((8, 3)), np.zeros((8, 2)), np.zeros(8), np.zeros(2), np.zeros(2), np.zeros(2))

    @settings(max_examples=100, deadline=None)
    @given(arrays(np.float64, 3, elements=st.floats(-1e6, 1e6)))
    def test_bounded(self, x):
        rng = np.random.default_rng(0)
        Wx, Wh, b = cell_params(rng, 3, 2, scale=3.0)
        h, _ = nn.cell_step(Wx, Wh, b, x, np.zeros(2), np.zeros(2))
        assert np.all(np.abs(h) < 1)


class TestSequence:
    def setup_method(self):
        rng = np.random.default_rng(5)
        self.Wx, self.Wh, self.b = cell_params(rng, 3, 4)
        self.X = rng.normal(size=(5, 3))

    def test_single_input(self):
        h = nn.encode_sequence(self.Wx, self.Wh, self.b, self.X[:1])
        h1, _ = nn.cell_step(self.Wx, self.Wh, self.b, self.X[0], np.zeros(4), np.zeros(4))
        np.testing.assert_array_equal(h, h1)

    def test_zero_params(self):
        z = [np.zeros_like(a) for a in (self.Wx, self.Wh, self.b)]
        np.testing.assert_array_equal(nn.encode_sequence(*z, self.X), 0)

    def test_prefix_property(self):
        h, c = np.zeros(4), np.zeros(4)
        for k in range(len(self.X)):
            h, c = nn.cell_step(self.Wx, self.Wh, self.b, self.X[k], h, c)
            np.testing.assert_allclose(nn.encode_sequence(self.Wx, self.Wh, self.b, self.X[:k + 1]), h,
                                       rtol=0, atol=1e-15)

    def test_empty_sequence(self):
        with pytest.raises(ValueError):
            nn.encode_sequence(self.Wx, self.Wh, self.b, np.zeros((0, 3)))

    def test_backward_matches_finite_differences(self):
        rng = np.random.default_rng(9)
        v = rng.normal(size=4)

        def f():
            return float(v @ nn.encode_sequence(self.Wx, self.Wh, self.b, self.X))

        _, cache = nn.run_sequence(self.Wx, self.Wh, self.b, self.X)
        grads = (np.zeros_like(self.Wx), np.zeros_like(self.Wh), np.zeros_like(self.b))
        dX = nn.sequence_backward(self.Wx, self.Wh, v, cache, grads)
        for analytic, target in zip((*grads, dX), (self.Wx, self.Wh, self.b, self.X)):
            np.testing.assert_allclose(analytic, fd_grad(f, target), rtol=1e-6, atol=1e-8)


class TestSoftmax:
    def test_uniform(self):
        np.testing.assert_array_equal(nn.softmax(np.zeros(2)), [0.5, 0.5])

    def test_cross_entropy(self):
        assert nn.cross_entropy(np.array([0.25, 0.75]), 1) == pytest.approx(0.2876820724517809, abs=1e-12)

    def test_bad_gold(self):
        with pytest.raises(ValueError):
            nn.cross_entropy(np.array([0.5, 0.5]), 2)

    @settings(max_examples=200, deadline=None)
    @given(arrays(np.float64, st.integers(1, 8), elements=st.floats(-50, 50)), st.floats(-100, 100))
    def test_sum_and_shift(self, z, alpha):
        c = nn.softmax(z)
        assert abs(c.sum() - 1.0) <= 1e-12
        np.testing.assert_allclose(nn.softmax(z + alpha), c, rtol=1e-9, atol=1e-15)

    def test_large_logits_stay_finite(self):
        assert np.all(np.isfinite(nn.softmax(np.array([1e308, 0.0]))))

    def test_logit_gradient(self):
        z = np.array([0.3, -1.2, 2.0])
        analytic = nn.softmax_xent_grad(nn.softmax(z), 2)
        np.testing.assert_array_equal(analytic, nn.softmax(z) - np.eye(3)[2])
        np.testing.assert_allclose(analytic, fd_grad(lambda: nn.cross_entropy(nn.softmax(z), 2), z),
                                   atol=1e-9)


class TestGradCheck:
    def test_affine_softmax_toy(self):
        rng = np.random.default_rng(1)
        params = nn.ParamSet()
        params.add("W", rng.normal(size=(2, 3)))
        x = rng.normal(size=3)

        def run():
            c = nn.softmax(nn.affine(params["W"], None, x))
            return nn.cross_entropy(c, 1), {"W": np.outer(nn.softmax_xent_grad(c, 1), x)}

        assert nn.grad_check(run, params) < 1e-6

    def test_constant_model(self):
        params = nn.ParamSet()
        params.add("unused", np.ones(3))
        assert nn.grad_check(lambda: (1.5, {"unused": np.zeros(3)}), params) == 0.0

    def test_detects_a_wrong_gradient(self):
        params = nn.ParamSet()
        params.add("w", np.array([1.0, 2.0]))
        wrong = lambda: (float(params["w"] @ params["w"]), {"w": params["w"].copy()})
        assert nn.grad_check(wrong, params) > 0.4

    def test_zero_loss_gradient_gives_zero_param_grads(self):
        rng = np.random.default_rng(0)
        W, x = rng.normal(size=(3, 4)), rng.normal(size=4)
        dz = np.zeros(3)
        np.testing.assert_array_equal(np.outer(dz, x), 0)
        np.testing.assert_array_equal(W.T @ dz, 0)


class TestAdam:
    def test_zero_grad_leaves_params_decays_moments(self):
        params = nn.ParamSet()
        p = params.add("p", np.array([1.0, -2.0]))
        params.m["p"][:] = 0.5
        params.v["p"][:] = 0.25
        nn.Adam(0.1).step(params)
        np.testing.assert_array_equal(p, [1.0, -2.0])
        np.testing.assert_allclose(params.m["p"], 0.45)
        np.testing.assert_allclose(params.v["p"], 0.25 * 0.999)

    def test_first_step(self):
        params = nn.ParamSet()
        p = params.add("p", np.array([0.0]))
        params.grads["p"][:] = 1.0
        nn.Adam(0.1).step(params)
        assert p[0] == pytest.approx(-0.1, rel=1e-6)

    def test_deterministic(self):
        out = []
        for _ in range(2):
            params = nn.ParamSet()
            p = params.add("p", np.arange(4.0))
            opt = nn.Adam(0.01)
            for t in range(5):
                params.grads["p"][:] = np.sin(np.arange(4.0) + t)
                opt.step(params)
            out.append(p.copy())
        np.testing.assert_array_equal(out[0], out[1])

    def test_non_finite_update_raises(self):
        params = nn.ParamSet()
        params.add("p", np.zeros(1))
        params.grads["p"][:] = np.nan
        with pytest.raises(FloatingPointError):
            nn.Adam().step(params)


class TestInit:
    def test_glorot_bounds(self):
        w = nn.glorot(np.random.default_rng(0), 30, 20)
        assert np.abs(w).max() <= math.sqrt(6 / 50)

    def test_cell_init(self):
        params = nn.ParamSet()
        nn.init_cell(params, "c", 3, 2, np.random.default_rng(0))
        np.testing.assert_array_equal(params["c.b"], [0, 0, 1, 1, 0, 0, 0, 0])

    def test_named_streams(self):
        a = nn.rng_for(1, "init").random(3)
        np.testing.assert_array_equal(a, nn.rng_for(1, "init").random(3))
        assert not np.array_equal(a, nn.rng_for(1, "dropout").random(3))
        assert not np.array_equal(a, nn.rng_for(2, "init").random(3))


class TestCheckpoint:
    def test_round_trip_and_bytes(self):
        t = {"W": np.random.default_rng(0).normal(size=(2, 3)), "b": np.array([0.1, 1e-300])}
        a, b = io.StringIO(), io.StringIO()
        nn.save_checkpoint(a, t, {"k": [1, 2]})
        nn.save_checkpoint(b, dict(reversed(list(t.items()))), {"k": [1, 2]})
        assert a.getvalue() == b.getvalue()
        tensors, meta = nn.load_checkpoint(io.StringIO(a.getvalue()))
        assert meta == {"k": [1, 2]}
        for k in t:
            np.testing.assert_array_equal(tensors[k], t[k])

    def test_rejects_foreign_json(self):
        with pytest.raises(ValueError):
            nn.load_checkpoint(io.StringIO('{"format": "other"}'))
