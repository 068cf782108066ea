"""The ChannelNet detector.

Each iteration runs a receive-antenna processor Φ, the channel layer Hᵀ, a skip
connection, a transmit-antenna processor Ψ, the channel layer H and the subtraction of y.
Processors act on every antenna with shared weights, so one set of parameters serves any
antenna count. The last Ψ emits one logit per PAM level for every real transmit dimension.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from channelnet.detectors.base import DetectionResult, DetectorInput
from channelnet.exceptions import (
    ConfigurationError,
    ContractViolation,
    ForwardDivergedError,
)
from channelnet.modulation import frame_from_labels
from channelnet.neural import (
    LINEAR_GAIN,
    RELU_GAIN,
    Conv1dLayer,
    DenseLayer,
    ReLU,
    Sequential,
    grad_check,
    softmax_xent,
)
from channelnet.numerics import (
    INIT_NAMESPACE,
    RngStream,
    make_stream_id,
    matmul,
    nested_scope,
)

logger = logging.getLogger(__name__)

VARIANTS = ("mlp", "conv")
CONV_PLACEMENTS = ("before", "after")


@dataclass(frozen=True)
class ChannelNetConfig:
    layers: int = 20
    features: int = 10
    classes: int = 4
    variant: str = "mlp"
    hidden: int | None = None
    kernel_size: int = 3
    filters: int = 10
    conv_placement: str = "before"
    head_gain: float = 0.01

    def __post_init__(self):
        if self.layers < 1 or self.features < 1 or self.classes < 2:  # noqa: PLR2004
            raise ConfigurationError(
                "ChannelNet needs layers >= 1, features >= 1 and classes >= 2"
            )
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown ChannelNet variant {self.variant!r}")
        if self.conv_placement not in CONV_PLACEMENTS:
            raise ConfigurationError(f"unknown conv placement {self.conv_placement!r}")
        if self.kernel_size % 2 == 0:
            raise ConfigurationError(f"kernel size must be odd, got {self.kernel_size}")

    @property
    def hidden_units(self):
        return self.hidden or self.features

    def as_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, values):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise ConfigurationError(f"unknown ChannelNet config keys: {sorted(unknown)}")
        return cls(**values)


def _mlp(config, in_features, out_features, stream):
    hidden = config.hidden_units
    return [
        DenseLayer(in_features, hidden, stream, gain=RELU_GAIN),
        ReLU(),
        DenseLayer(hidden, out_features, stream, gain=LINEAR_GAIN),
    ]


def _conv_stack(config, in_channels, out_channels, stream):
    return [
        Conv1dLayer(
            in_channels, config.filters, config.kernel_size, stream, gain=RELU_GAIN
        ),
        ReLU(),
        Conv1dLayer(
            config.filters, out_channels, config.kernel_size, stream, gain=LINEAR_GAIN
        ),
    ]


def build_processor(config, in_features, out_features, stream=None, head=False):
    """Antenna feature processor: a shared MLP, preceded or followed by convolutions."""
    if config.variant == "mlp":
        layers = _mlp(config, in_features, out_features, stream)
    elif config.conv_placement == "before":
        layers = _conv_stack(config, in_features, config.filters, stream)
        layers += _mlp(config, config.filters, out_features, stream)
    else:
        layers = _mlp(config, in_features, config.hidden_units, stream)
        layers += _conv_stack(config, config.hidden_units, out_features, stream)
    if head and stream is not None:
        last = layers[-1]
        for value in last.parameters().values():
            value *= config.head_gain
    return Sequential(layers)


def processor_mults(config, in_features, out_features, positions):
    """Multiplies of one processor applied to ``positions`` antennas."""
    hidden = config.hidden_units
    k, filters = config.kernel_size, config.filters
    if config.variant == "mlp":
        return positions * (in_features * hidden + hidden * out_features)
    if config.conv_placement == "before":
        conv = k * (in_features * filters + filters * filters)
        dense = filters * hidden + hidden * out_features
    else:
        dense = in_features * hidden + hidden * hidden
        conv = k * (hidden * filters + filters * out_features)
    return positions * (conv + dense)


def channel_layer_mults(config, N, K):
    # The last iteration's receive update is never consumed and is not computed.
    return (2 * config.layers - 1) * N * K * config.features


def channelnet_mults(config, N, K):
    """Closed-form multiply count of one forward pass on an N×K lifted channel."""
    d, L = config.features, config.layers
    total = channel_layer_mults(config, N, K)
    for t in range(L):
        total += processor_mults(config, 1 if t == 0 else d, d, N)
        total += processor_mults(config, d, config.classes if t == L - 1 else d, K)
    return total


@dataclass
class ForwardCache:
    H: np.ndarray
    iterations: list
    single: bool


class ChannelNetModel:
    def __init__(self, config: ChannelNetConfig, seed=0, initialize=True):
        self.config = config
        self.seed = seed
        stream = RngStream(seed, make_stream_id(INIT_NAMESPACE)) if initialize else None
        d, L = config.features, config.layers
        self.phi, self.psi = [], []
        for t in range(L):
            self.phi.append(build_processor(config, 1 if t == 0 else d, d, stream))
            last = t == L - 1
            self.psi.append(
                build_processor(config, d, config.classes if last else d, stream, head=last)
            )

    def __repr__(self):
        return f"ChannelNetModel({self.config})"

    def parameters(self):
        """Every trainable array keyed by path, in declaration order."""
        params = {}
        for t, (phi, psi) in enumerate(zip(self.phi, self.psi)):
            params.update({f"phi.{t}.{k}": v for k, v in phi.parameters().items()})
            params.update({f"psi.{t}.{k}": v for k, v in psi.parameters().items()})
        return params

    def forward(self, H, y):
        return forward(self, H, y)

    def backward(self, cache, d_logits):
        return backward(self, cache, d_logits)


def _check_inputs(H, y):
    if H.ndim not in (2, 3) or y.shape != H.shape[:-1]:
        raise ContractViolation(f"channel {H.shape} and received {y.shape} disagree")
    if not (np.isfinite(H).all() and np.isfinite(y).all()):
        raise ContractViolation("channel and received vector must be finite")


def forward(model: ChannelNetModel, H, y):
    """Run every iteration and return ``(logits, cache)``.

    Accepts a single ``(N, K)`` channel with ``(N,)`` observations, or a leading batch
    axis on both. Logits have shape ``(..., K, classes)``.
    """
    _check_inputs(H, y)
    single = H.ndim == 2  # noqa: PLR2004
    if single:
        H, y = H[None], y[None]
    H_t = np.swapaxes(H, -1, -2)
    y_col = y[..., None]
    layers = model.config.layers

    F_rx = y_col
    F_tx_old = None
    iterations = []
    for t in range(layers):
        F_rx, phi_cache = model.phi[t].forward(F_rx)
        F_tx = matmul(H_t, F_rx, tag="channel")
        if F_tx_old is not None:
            F_tx = F_tx + F_tx_old
        F_tx_old = F_tx
        F_tx, psi_cache = model.psi[t].forward(F_tx)
        iterations.append((phi_cache, psi_cache))
        if t < layers - 1:
            F_rx = matmul(H, F_tx, tag="channel") - y_col
            finite = np.isfinite(F_rx).all() and np.isfinite(F_tx_old).all()
        else:
            finite = np.isfinite(F_tx).all()
        if not finite:
            raise ForwardDivergedError(t + 1)

    cache = ForwardCache(H=H, iterations=iterations, single=single)
    return (F_tx[0] if single else F_tx), cache


def backward(model: ChannelNetModel, cache: ForwardCache, d_logits):
    """Reverse-mode gradients of every parameter, keyed like ``model.parameters()``."""
    H = cache.H
    H_t = np.swapaxes(H, -1, -2)
    d_out = d_logits[None] if cache.single else d_logits
    d_carry = None
    grads = {}
    for t in reversed(range(model.config.layers)):
        phi_cache, psi_cache = cache.iterations[t]
        d_tx, psi_grads = model.psi[t].backward(psi_cache, d_out)
        grads.update({f"psi.{t}.{k}": v for k, v in psi_grads.items()})
        if d_carry is not None:
            d_tx = d_tx + d_carry
        d_carry = d_tx
        d_phi_in, phi_grads = model.phi[t].backward(phi_cache, np.matmul(H, d_tx))
        grads.update({f"phi.{t}.{k}": v for k, v in phi_grads.items()})
        if t > 0:
            d_out = np.matmul(H_t, d_phi_in)
    return {path: grads[path] for path in model.parameters()}


def detect(model: ChannelNetModel, detector_input: DetectorInput) -> DetectionResult:
    """Hard decisions from the per-dimension argmax; the noise variance is never read."""
    constellation = detector_input.constellation
    if constellation.classes != model.config.classes:
        raise ConfigurationError(
            f"model emits {model.config.classes} classes but the constellation has "
            f"{constellation.classes} levels per dimension"
        )
    with nested_scope() as counter:
        logits, _ = forward(model, detector_input.H, detector_input.y)
    labels = np.argmax(logits, axis=-1)
    return DetectionResult(
        hard=frame_from_labels(constellation, labels),
        logits=logits,
        mults=counter.multiplies if counter else 0,
    )


def check_network(variant, stream, tolerance=1e-4, batch=3):
    """End-to-end gradient report of a tiny ChannelNet (N=4, K=2, d=3, L=2)."""
    config = ChannelNetConfig(
        layers=2, features=3, classes=2, variant=variant, filters=3, head_gain=1.0
    )
    model = ChannelNetModel(config, seed=stream.seed)
    H = stream.gaussian((batch, 4, 2))
    y = stream.gaussian((batch, 4))
    labels = stream.integers(config.classes, (batch, 2))

    def loss_fn():
        logits, _ = forward(model, H, y)
        return softmax_xent(logits, labels)[0]

    logits, cache = forward(model, H, y)
    _, d_logits = softmax_xent(logits, labels)
    grads = backward(model, cache, d_logits)
    return grad_check(loss_fn, model.parameters(), grads, tolerance=tolerance)
