"""Trainable layers with explicit forward and backward passes.

Layers keep only parameters. ``forward`` returns ``(output, cache)`` and ``backward`` takes
that cache back, so several forward passes over the same frozen parameters can run at
once. Parameters and gradients are flat dicts keyed by a dotted path.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import log_softmax

from channelnet.exceptions import ContractViolation
from channelnet.numerics import matmul, tally

logger = logging.getLogger(__name__)

# Gain 2 is He-uniform (layers feeding a ReLU); gain 1 keeps linear outputs at unit scale.
RELU_GAIN = 2.0
LINEAR_GAIN = 1.0


def he_uniform(stream, shape, fan_in, gain=RELU_GAIN):
    limit = math.sqrt(3.0 * gain / fan_in)
    return stream.uniform(-limit, limit, shape)


class DenseLayer:
    """Y = X Wᵀ + b over the last axis; leading axes are batch and antenna axes."""

    def __init__(self, in_features, out_features, stream=None, gain=RELU_GAIN):
        self.in_features = in_features
        self.out_features = out_features
        if stream is None:
            self.W = np.zeros((out_features, in_features))
        else:
            self.W = he_uniform(stream, (out_features, in_features), in_features, gain)
        self.b = np.zeros(out_features)

    def parameters(self):
        return {"W": self.W, "b": self.b}

    def forward(self, X):
        if X.shape[-1] != self.in_features:
            raise ContractViolation(
                f"dense layer expects {self.in_features} input features, got {X.shape}"
            )
        return matmul(X, self.W.T, tag="mlp") + self.b, X

    def backward(self, cache, dY):
        X = cache
        if dY.shape != (*X.shape[:-1], self.out_features):
            raise ContractViolation(f"gradient shape {dY.shape} does not match the output")
        flat_dY = dY.reshape(-1, self.out_features)
        grads = {
            "W": flat_dY.T @ X.reshape(-1, self.in_features),
            "b": flat_dY.sum(axis=0),
        }
        return dY @ self.W, grads


class ReLU:
    def parameters(self):
        return {}

    def forward(self, X):
        mask = X > 0
        return np.where(mask, X, 0.0), mask

    def backward(self, cache, dY):
        return np.where(cache, dY, 0.0), {}


class Conv1dLayer:
    """Zero-padded "same" convolution along the antenna axis.

    Input is ``(batch, positions, channels)`` or ``(positions, channels)``; output keeps the
    number of positions and has ``filters`` channels.
    """

    def __init__(self, in_channels, filters, kernel_size=3, stream=None, gain=RELU_GAIN):
        if kernel_size % 2 == 0:
            raise ContractViolation(f"kernel size must be odd, got {kernel_size}")
        self.in_channels = in_channels
        self.filters = filters
        self.kernel_size = kernel_size
        shape = (filters, in_channels, kernel_size)
        if stream is None:
            self.kernels = np.zeros(shape)
        else:
            self.kernels = he_uniform(stream, shape, in_channels * kernel_size, gain)
        self.bias = np.zeros(filters)

    def parameters(self):
        return {"kernels": self.kernels, "bias": self.bias}

    def forward(self, X):
        squeeze = X.ndim == 2  # noqa: PLR2004
        if squeeze:
            X = X[None]
        if X.shape[-1] != self.in_channels:
            raise ContractViolation(
                f"conv layer expects {self.in_channels} channels, got {X.shape}"
            )
        pad = self.kernel_size // 2
        padded = np.pad(X, ((0, 0), (pad, pad), (0, 0)))
        windows = sliding_window_view(padded, self.kernel_size, axis=1)
        Y = np.einsum("bpck,fck->bpf", windows, self.kernels) + self.bias
        tally(windows.size * self.filters, "conv")
        return (Y[0] if squeeze else Y), (windows, padded.shape, squeeze)

    def backward(self, cache, dY):
        windows, padded_shape, squeeze = cache
        if squeeze:
            dY = dY[None]
        positions = dY.shape[1]
        grads = {
            "kernels": np.einsum("bpck,bpf->fck", windows, dY),
            "bias": dY.sum(axis=(0, 1)),
        }
        d_padded = np.zeros(padded_shape)
        for offset in range(self.kernel_size):
            d_padded[:, offset : offset + positions, :] += dY @ self.kernels[:, :, offset]
        pad = self.kernel_size // 2
        dX = d_padded[:, pad : pad + positions, :]
        return (dX[0] if squeeze else dX), grads


class Sequential:
    def __init__(self, layers):
        self.layers = list(layers)

    def parameters(self):
        return {
            f"{index}.{name}": value
            for index, layer in enumerate(self.layers)
            for name, value in layer.parameters().items()
        }

    def forward(self, X):
        caches = []
        for layer in self.layers:
            X, cache = layer.forward(X)
            caches.append(cache)
        return X, caches

    def backward(self, caches, dY):
        grads = {}
        for index in reversed(range(len(self.layers))):
            dY, layer_grads = self.layers[index].backward(caches[index], dY)
            grads.update({f"{index}.{name}": value for name, value in layer_grads.items()})
        return dY, grads


def softmax_xent(logits, labels):
    """Mean cross-entropy over every labelled row and its gradient w.r.t. the logits."""
    labels = np.asarray(labels)
    classes = logits.shape[-1]
    if logits.shape[:-1] != labels.shape:
        raise ContractViolation(f"logits {logits.shape} do not match labels {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise ContractViolation(f"labels must lie in [0, {classes})")
    log_probs = log_softmax(logits, axis=-1).reshape(-1, classes)
    flat = labels.reshape(-1)
    rows = flat.size
    picked = log_probs[np.arange(rows), flat]
    d_logits = np.exp(log_probs)
    d_logits[np.arange(rows), flat] -= 1.0
    return float(-picked.mean()), (d_logits / rows).reshape(logits.shape)


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(state: AdamState, params, grads):
    """Bias-corrected Adam update, applied to ``params`` in place at ``state.lr``."""
    state.t += 1
    correction1 = 1.0 - state.beta1**state.t
    correction2 = 1.0 - state.beta2**state.t
    for path, param in params.items():
        grad = grads[path]
        if grad.shape != param.shape:
            raise ContractViolation(f"gradient for {path} has shape {grad.shape}")
        m = state.m.setdefault(path, np.zeros_like(param))
        v = state.v.setdefault(path, np.zeros_like(param))
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * np.square(grad)
        param -= state.lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
    return params


# Relative errors are measured against max(|analytic|, |numeric|, floor).
_GRAD_SCALE_FLOOR = 1e-3


@dataclass
class GradCheckReport:
    tolerance: float
    errors: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(error < self.tolerance for error in self.errors.values())

    @property
    def failures(self):
        return [path for path, error in self.errors.items() if error >= self.tolerance]

    @property
    def worst(self):
        return max(self.errors.items(), key=lambda item: item[1], default=(None, 0.0))


def grad_check(  # noqa: PLR0913
    loss_fn, params, grads, tolerance=1e-6, step=1e-5, max_entries=None, stream=None
):
    """Compare analytic ``grads`` with central differences of ``loss_fn()``.

    ``params`` are perturbed in place and restored. With ``max_entries`` only that many
    randomly chosen entries per parameter are checked (``stream`` picks them).
    """
    report = GradCheckReport(tolerance=tolerance)
    for path, param in params.items():
        analytic = grads[path]
        indices = list(np.ndindex(param.shape))
        if max_entries is not None and len(indices) > max_entries:
            chosen = stream.generator.choice(len(indices), max_entries, replace=False)
            indices = [indices[i] for i in sorted(chosen)]
        worst = 0.0
        for index in indices:
            original = param[index]
            param[index] = original + step
            plus = loss_fn()
            param[index] = original - step
            minus = loss_fn()
            param[index] = original
            numeric = (plus - minus) / (2.0 * step)
            scale = max(abs(analytic[index]), abs(numeric), _GRAD_SCALE_FLOOR)
            worst = max(worst, abs(analytic[index] - numeric) / scale)
        report.errors[path] = worst
        if worst >= tolerance:
            logger.warning(f"gradient check failed for {path}: relative error {worst:.3e}")
    return report


def _away_from_zero(X, margin=0.1):
    return np.where(X < 0, X - margin, X + margin)


def _layer_report(layer, X, stream, tolerance):
    Y, cache = layer.forward(X)
    weights = stream.gaussian(Y.shape)
    params = {**layer.parameters(), "input": X}

    def loss_fn():
        out, _ = layer.forward(params["input"])
        return float(np.sum(out * weights))

    dX, grads = layer.backward(cache, weights)
    return grad_check(loss_fn, params, {**grads, "input": dX}, tolerance=tolerance)


def check_layers(stream, tolerance=1e-6):
    """Gradient reports for every layer type and the loss, keyed by layer name.

    Each layer is checked through a random linear functional of its output, so weights and
    inputs are checked together.
    """
    dense = DenseLayer(3, 4, stream)
    reports = {
        "dense": _layer_report(dense, stream.gaussian((5, 3)), stream, tolerance),
        "relu": _layer_report(
            ReLU(), _away_from_zero(stream.gaussian((5, 4))), stream, tolerance
        ),
        "conv1d": _layer_report(
            Conv1dLayer(2, 3, 3, stream), stream.gaussian((2, 5, 2)), stream, tolerance
        ),
    }
    logits = stream.gaussian((6, 4))
    labels = stream.integers(4, 6)
    _, d_logits = softmax_xent(logits, labels)
    params = {"logits": logits}
    reports["softmax_xent"] = grad_check(
        lambda: softmax_xent(params["logits"], labels)[0],
        params,
        {"logits": d_logits},
        tolerance=tolerance,
    )
    return reports
