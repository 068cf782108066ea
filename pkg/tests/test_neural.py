import math

import numpy as np
import pytest

from channelnet.exceptions import ContractViolation
from channelnet.neural import (
    AdamState,
    Conv1dLayer,
    DenseLayer,
    ReLU,
    Sequential,
    adam_step,
    check_layers,
    grad_check,
    he_uniform,
    softmax_xent,
)
from channelnet.numerics import count_mults


def test_every_layer_passes_the_gradient_check(stream):
    reports = check_layers(stream, tolerance=1e-6)

    assert set(reports) == {"dense", "relu", "conv1d", "softmax_xent"}
    for name, report in reports.items():
        assert report.passed, (name, report.worst)


class TestDense:
    def test_forward(self, stream):
        layer = DenseLayer(3, 2, stream)
        X = stream.gaussian((4, 5, 3))
        Y, _ = layer.forward(X)
        np.testing.assert_allclose(Y, X @ layer.W.T + layer.b)

    def test_counts_as_mlp(self, stream):
        with count_mults() as counter:
            DenseLayer(3, 2, stream).forward(stream.gaussian((5, 3)))
        assert counter.tags == {"mlp": 30}

    def test_wrong_width(self, stream):
        with pytest.raises(ContractViolation):
            DenseLayer(3, 2, stream).forward(stream.gaussian((4, 2)))

    def test_init_bounds(self, stream):
        W = he_uniform(stream, (200, 50), 50)
        assert np.abs(W).max() <= math.sqrt(6 / 50)
        assert not DenseLayer(3, 2).W.any()


def test_relu():
    X = np.array([[-1.0, 0.0, 2.0]])
    Y, cache = ReLU().forward(X)
    np.testing.assert_array_equal(Y, [[0.0, 0.0, 2.0]])
    dX, grads = ReLU().backward(cache, np.ones_like(X))
    np.testing.assert_array_equal(dX, [[0.0, 0.0, 1.0]])
    assert grads == {}


class TestConv1d:
    def test_matches_a_direct_convolution(self, stream):
        layer = Conv1dLayer(2, 3, 3, stream)
        layer.bias[...] = stream.gaussian(3)
        X = stream.gaussian((2, 6, 2))
        Y, _ = layer.forward(X)

        padded = np.pad(X, ((0, 0), (1, 1), (0, 0)))
        expected = np.empty((2, 6, 3))
        for b, p, f in np.ndindex(expected.shape):
            window = padded[b, p : p + 3, :]
            expected[b, p, f] = np.sum(window.T * layer.kernels[f]) + layer.bias[f]
        np.testing.assert_allclose(Y, expected, atol=1e-12)

    def test_unbatched_input(self, stream):
        layer = Conv1dLayer(2, 3, 5, stream)
        X = stream.gaussian((7, 2))
        Y, _ = layer.forward(X)
        assert Y.shape == (7, 3)
        np.testing.assert_allclose(Y, layer.forward(X[None])[0][0])

    def test_even_kernel(self):
        with pytest.raises(ContractViolation, match="odd"):
            Conv1dLayer(2, 3, 4)


def test_sequential_parameter_paths(stream):
    model = Sequential([DenseLayer(2, 3, stream), ReLU(), DenseLayer(3, 1, stream)])
    assert list(model.parameters()) == ["0.W", "0.b", "2.W", "2.b"]
    Y, caches = model.forward(stream.gaussian((4, 2)))
    _, grads = model.backward(caches, np.ones_like(Y))
    assert set(grads) == set(model.parameters())


class TestSoftmaxXent:
    def test_uniform_logits(self):
        loss, d_logits = softmax_xent(np.zeros((5, 4)), np.arange(5) % 4)
        assert loss == pytest.approx(math.log(4))
        np.testing.assert_allclose(d_logits.sum(axis=-1), 0.0, atol=1e-15)

    def test_large_logits_stay_finite(self):
        loss, d_logits = softmax_xent(np.array([[1000.0, -1000.0]]), np.array([1]))
        assert loss == pytest.approx(2000.0)
        assert np.isfinite(d_logits).all()

    def test_bad_labels(self):
        with pytest.raises(ContractViolation):
            softmax_xent(np.zeros((2, 3)), np.array([0, 3]))
        with pytest.raises(ContractViolation):
            softmax_xent(np.zeros((2, 3)), np.array([0, 1, 2]))


class TestAdam:
    def test_first_step_moves_by_the_learning_rate(self):
        params = {"w": np.array([1.0, -2.0, 0.5])}
        grads = {"w": np.array([0.3, -4.0, 1e-3])}
        adam_step(AdamState(lr=0.01), params, grads)
        np.testing.assert_allclose(params["w"], [0.99, -1.99, 0.49], atol=1e-6)

    def test_minimizes_a_quadratic(self):
        params = {"w": np.array([3.0, -1.0])}
        state = AdamState(lr=0.05)
        for _ in range(1000):
            adam_step(state, params, {"w": 2 * params["w"]})
        np.testing.assert_allclose(params["w"], 0.0, atol=1e-2)
        assert state.t == 1000

    def test_gradient_shape(self):
        with pytest.raises(ContractViolation):
            adam_step(AdamState(), {"w": np.zeros(2)}, {"w": np.zeros(3)})


class TestGradCheck:
    def test_catches_a_wrong_gradient(self, caplog):
        params = {"w": np.array([1.0, 2.0])}

        def loss_fn():
            return float(np.sum(params["w"] ** 2))

        report = grad_check(loss_fn, params, {"w": np.array([2.0, 5.0])})

        assert not report.passed
        assert report.failures == ["w"]
        assert report.worst[0] == "w"
        assert "gradient check failed for w" in caplog.text
        np.testing.assert_array_equal(params["w"], [1.0, 2.0])

    def test_sampled_entries(self, stream):
        params = {"w": stream.gaussian(100)}

        def loss_fn():
            return float(np.sum(np.sin(params["w"])))

        report = grad_check(
            loss_fn, params, {"w": np.cos(params["w"])}, max_entries=10, stream=stream
        )
        assert report.passed
