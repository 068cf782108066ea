"""Square QAM in the lifted real representation.

A complex symbol of an M-QAM constellation is two independent √M-PAM symbols. In a lifted
frame of length K, real dimensions ``i`` and ``i + K/2`` belong to the same complex symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from channelnet.exceptions import ConfigurationError, ContractViolation

SUPPORTED_ORDERS = (4, 16, 64, 256)

# Equidistant inputs resolve to the lower level.
_TIE_EPSILON = 1e-12


@dataclass(frozen=True)
class Constellation:
    qam_order: int
    pam_levels: np.ndarray
    scale: float

    @property
    def classes(self):
        return len(self.pam_levels)

    @property
    def name(self):
        return "qpsk" if self.qam_order == 4 else f"{self.qam_order}qam"  # noqa: PLR2004


@dataclass(frozen=True)
class SymbolFrame:
    x: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return self.x.shape[-1]


def build_constellation(qam_order: int) -> Constellation:
    if qam_order not in SUPPORTED_ORDERS:
        raise ConfigurationError(
            f"unsupported QAM order {qam_order}; expected one of {SUPPORTED_ORDERS}"
        )
    side = math.isqrt(qam_order)
    odd = np.arange(-(side - 1), side, 2, dtype=np.float64)
    scale = 1.0 / np.sqrt(2.0 * np.mean(odd**2))
    levels = odd * scale
    levels.setflags(write=False)
    return Constellation(qam_order=qam_order, pam_levels=levels, scale=float(scale))


def frame_from_labels(constellation: Constellation, labels) -> SymbolFrame:
    labels = np.asarray(labels, dtype=np.int64)
    return SymbolFrame(x=constellation.pam_levels[labels], labels=labels)


def draw_symbols(constellation: Constellation, K: int, stream, batch=None) -> SymbolFrame:
    """Draw i.i.d. uniform PAM symbols; ``batch`` adds a leading axis."""
    if K < 1:
        raise ContractViolation("draw_symbols() needs K >= 1")
    shape = K if batch is None else (batch, K)
    return frame_from_labels(constellation, stream.integers(constellation.classes, shape))


def slice_symbols(constellation: Constellation, u) -> SymbolFrame:
    """Nearest-level decision per entry, ties toward the lower level."""
    u = np.asarray(u, dtype=np.float64)
    top = constellation.classes - 1
    # Continuous level index: level i sits at (2i - top) * scale.
    position = (u / constellation.scale + top) / 2.0
    labels = np.ceil(position - 0.5 - _TIE_EPSILON).astype(np.int64)
    return frame_from_labels(constellation, np.clip(labels, 0, top))


def _check_pair(truth: SymbolFrame, est: SymbolFrame):
    if truth.labels.shape != est.labels.shape:
        raise ContractViolation(
            f"frame shapes differ: {truth.labels.shape} vs {est.labels.shape}"
        )
    if truth.labels.shape[-1] % 2:
        raise ContractViolation("lifted frames have an even number of real dimensions")


def complex_symbol_errors(truth: SymbolFrame, est: SymbolFrame):
    """Boolean error mask over complex symbols (last axis of length K/2)."""
    _check_pair(truth, est)
    wrong = truth.labels != est.labels
    half = wrong.shape[-1] // 2
    return wrong[..., :half] | wrong[..., half:]


def symbol_errors(truth: SymbolFrame, est: SymbolFrame) -> int:
    return int(np.count_nonzero(complex_symbol_errors(truth, est)))


def dimension_error_rate(truth: SymbolFrame, est: SymbolFrame) -> float:
    """Fraction of wrong real-dimension decisions."""
    _check_pair(truth, est)
    return float(np.mean(truth.labels != est.labels))
