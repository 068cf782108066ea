"""Channel, noise and transmission simulation.

Random draws for a batch always happen in the same order: channel, symbols, noise, then
estimation error. Fixing that order is what makes a ``(seed, stream_id)`` pair reproduce a
batch exactly.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from channelnet.exceptions import ChannelNetError, ConfigurationError, ContractViolation
from channelnet.modulation import Constellation, SymbolFrame, draw_symbols
from channelnet.numerics import RealMatrix, RngStream, lift_complex, unlift_matrix
from channelnet.units import db_to_linear
from channelnet.utils import snr_reference

logger = logging.getLogger(__name__)


class ChannelModel(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    KRONECKER = "kronecker"
    IDENTITY = "identity"


class NoiseKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T = "student_t"
    LAPLACE = "laplace"


def _coerce(enum_class, value, what):
    try:
        return enum_class(value)
    except ValueError:
        choices = ", ".join(member.value for member in enum_class)
        message = f"unknown {what} {value!r}; expected one of {choices}"
        raise ConfigurationError(message) from None


@dataclass(frozen=True)
class ChannelScenario:
    n_r: int
    n_t: int
    model: ChannelModel = ChannelModel.RAYLEIGH
    rho: float = 0.0
    noise: NoiseKind = NoiseKind.GAUSSIAN
    nu: float = 3.0
    est_snr_db: float | None = None
    qam_order: int = 16
    seed: int = 0

    def __post_init__(self):
        model = _coerce(ChannelModel, self.model, "channel model")
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "noise", _coerce(NoiseKind, self.noise, "noise kind"))
        if self.est_snr_db == math.inf:
            object.__setattr__(self, "est_snr_db", None)
        if self.n_t < 1 or self.n_r < 1:
            raise ConfigurationError("antenna counts must be positive")
        if self.n_t > self.n_r:
            raise ConfigurationError(
                f"uplink scenarios need n_t <= n_r (got n_t={self.n_t}, n_r={self.n_r})"
            )
        if not 0.0 <= self.rho < 1.0:
            raise ConfigurationError(f"correlation rho must lie in [0, 1), got {self.rho}")
        if self.noise is NoiseKind.STUDENT_T and not self.nu > 2.0:  # noqa: PLR2004
            raise ConfigurationError(f"Student-t noise needs nu > 2, got {self.nu}")

    @property
    def N(self):
        return 2 * self.n_r

    @property
    def K(self):
        return 2 * self.n_t

    @property
    def digest(self):
        parts = [f"{self.model.value}", f"{self.n_r}x{self.n_t}", f"{self.qam_order}qam"]
        if self.model is ChannelModel.KRONECKER:
            parts.insert(1, f"rho{self.rho:g}")
        noise = self.noise.value
        if self.noise is NoiseKind.STUDENT_T:
            noise += f"{self.nu:g}"
        parts.append(noise)
        if self.est_snr_db is not None:
            parts.append(f"est{self.est_snr_db:g}dB")
        return "-".join(parts)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class TransmissionSample:
    H: RealMatrix
    H_hat: RealMatrix
    y: np.ndarray
    frame: SymbolFrame
    noise: np.ndarray
    snr_db: float
    noise_var: float


@dataclass(frozen=True)
class TransmissionBatch:
    """Arrays with a leading batch axis; iterate for per-sample views."""

    H: np.ndarray
    H_hat: np.ndarray
    y: np.ndarray
    frame: SymbolFrame
    noise: np.ndarray
    snr_db: np.ndarray
    noise_var: np.ndarray

    def __len__(self):
        return self.H.shape[0]

    def __getitem__(self, index):
        return TransmissionSample(
            H=self.H[index],
            H_hat=self.H_hat[index],
            y=self.y[index],
            frame=SymbolFrame(x=self.frame.x[index], labels=self.frame.labels[index]),
            noise=self.noise[index],
            snr_db=float(self.snr_db[index]),
            noise_var=float(self.noise_var[index]),
        )

    def __iter__(self):
        return (self[index] for index in range(len(self)))


def correlation_matrix(n, rho):
    """Exponential correlation model, R[i, j] = rho ** |i - j|."""
    return linalg.toeplitz(rho ** np.arange(n, dtype=np.float64))


@functools.lru_cache(maxsize=64)
def correlation_sqrt(n, rho):
    """Symmetric PSD square root U sqrt(Λ) Uᵀ of the exponential correlation matrix."""
    try:
        eigenvalues, eigenvectors = linalg.eigh(correlation_matrix(n, rho))
    except linalg.LinAlgError as exc:
        raise ChannelNetError(f"eigendecomposition failed for rho={rho}") from exc
    if eigenvalues.min() < -1e-10:  # noqa: PLR2004
        raise ChannelNetError(f"correlation matrix for rho={rho} is not PSD")
    root = (eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ eigenvectors.T
    root.setflags(write=False)
    return root


def draw_complex_channels(scenario: ChannelScenario, stream: RngStream, batch: int):
    shape = (batch, scenario.n_r, scenario.n_t)
    if scenario.model is ChannelModel.IDENTITY:
        return np.broadcast_to(
            np.eye(scenario.n_r, scenario.n_t, dtype=np.complex128), shape
        ).copy()
    std = math.sqrt(1.0 / (2.0 * scenario.n_r))
    H_w = std * (stream.gaussian(shape) + 1j * stream.gaussian(shape))
    if scenario.model is ChannelModel.KRONECKER:
        R_r = correlation_sqrt(scenario.n_r, scenario.rho)
        R_t = correlation_sqrt(scenario.n_t, scenario.rho)
        H_w = R_r @ H_w @ R_t
    return H_w


def draw_channels(scenario: ChannelScenario, stream: RngStream, batch: int) -> np.ndarray:
    return lift_complex(draw_complex_channels(scenario, stream, batch))


def draw_channel(scenario: ChannelScenario, stream: RngStream) -> RealMatrix:
    return draw_channels(scenario, stream, 1)[0]


def signal_power(scenario: ChannelScenario, H=None, x_power=1.0, reference=None):
    """Expected ‖Hx‖² for unit-power complex symbols scaled by ``x_power``.

    Every supported model has E‖H̃‖_F² = n_t, so the ensemble value is n_t · x_power.
    The "realization" reference uses the given lifted channel(s) instead.
    """
    reference = reference or snr_reference()
    if reference == "ensemble" or H is None:
        return scenario.n_t * x_power
    if reference != "realization":
        raise ConfigurationError(f"unknown SNR reference {reference!r}")
    # Each real dimension carries half the complex-symbol power.
    return x_power * np.sum(np.square(H), axis=(-2, -1)) / 2.0


def calibrate_noise(scenario: ChannelScenario, H, x_power, snr_db, reference=None):
    """Per-real-dimension noise variance hitting ``snr_db`` (scalar or array).

    ``snr_db = +inf`` is the zero-noise control and gives a variance of 0.
    """
    power = signal_power(scenario, H, x_power, reference)
    ratio = db_to_linear(snr_db)
    with np.errstate(divide="ignore"):
        return np.asarray(power / (scenario.N * np.asarray(ratio)), dtype=np.float64)[()]


def draw_noise(kind, noise_var, n, stream: RngStream, nu=3.0):
    """I.i.d. noise with variance exactly ``noise_var`` per entry.

    ``n`` is a count or a shape; ``noise_var`` broadcasts against the leading axes.
    """
    kind = _coerce(NoiseKind, kind, "noise kind")
    noise_var = np.asarray(noise_var, dtype=np.float64)
    if np.any(noise_var < 0):
        raise ContractViolation("noise variance must be non-negative")
    shape = (n,) if isinstance(n, int | np.integer) else tuple(n)
    if noise_var.ndim:
        extra_axes = (1,) * (len(shape) - noise_var.ndim)
        noise_var = noise_var.reshape(noise_var.shape + extra_axes)
    if kind is NoiseKind.GAUSSIAN:
        return np.sqrt(noise_var) * stream.gaussian(shape)
    if kind is NoiseKind.STUDENT_T:
        if not nu > 2.0:  # noqa: PLR2004
            raise ConfigurationError(f"Student-t noise needs nu > 2, got {nu}")
        return np.sqrt(noise_var * (nu - 2.0) / nu) * stream.generator.standard_t(nu, shape)
    return stream.generator.laplace(0.0, 1.0, shape) * np.sqrt(noise_var / 2.0)


def perturb_channel(H, snr_h_db, stream: RngStream):
    """Receiver-side estimate Ĥ = H + E with ‖H‖_F² / ‖E‖_F² at ``snr_h_db``.

    E is drawn complex and lifted, so Ĥ keeps the real-lifted block structure. Its
    per-real-entry variance is ‖H‖_F² / (N · K · 10^(snr_h_db/10)).
    """
    if snr_h_db is None or (math.isinf(snr_h_db) and snr_h_db > 0):
        return H.copy()
    H_c = unlift_matrix(H)
    n_r, n_t = H_c.shape[-2:]
    power = np.sum(np.abs(H_c) ** 2, axis=(-2, -1), keepdims=True)
    variance = power / (n_r * n_t * db_to_linear(snr_h_db))
    std = np.sqrt(variance / 2.0)
    E = std * (stream.gaussian(H_c.shape) + 1j * stream.gaussian(H_c.shape))
    return H + lift_complex(E)


def simulate_batch(
    scenario: ChannelScenario,
    constellation: Constellation,
    snr_db,
    batch: int,
    stream: RngStream,
) -> TransmissionBatch:
    """Simulate ``batch`` independent transmissions; ``snr_db`` may be per sample."""
    if batch < 1:
        raise ContractViolation("simulate() needs batch >= 1")
    H = draw_channels(scenario, stream, batch)
    frame = draw_symbols(constellation, scenario.K, stream, batch=batch)
    snr = np.broadcast_to(np.asarray(snr_db, dtype=np.float64), (batch,)).copy()
    noise_var = np.broadcast_to(calibrate_noise(scenario, H, 1.0, snr), (batch,)).copy()
    noise = draw_noise(
        scenario.noise, noise_var, (batch, scenario.N), stream, nu=scenario.nu
    )
    y = np.empty((batch, scenario.N))
    for index in range(batch):
        y[index] = H[index] @ frame.x[index] + noise[index]
    H_hat = perturb_channel(H, scenario.est_snr_db, stream)
    return TransmissionBatch(
        H=H, H_hat=H_hat, y=y, frame=frame, noise=noise, snr_db=snr, noise_var=noise_var
    )


def simulate(
    scenario: ChannelScenario,
    constellation: Constellation,
    snr_db: float,
    batch: int,
    stream: RngStream,
) -> list[TransmissionSample]:
    return list(simulate_batch(scenario, constellation, snr_db, batch, stream))
