from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from channelnet.exceptions import ContractViolation
from channelnet.modulation import Constellation, SymbolFrame


@dataclass(frozen=True)
class DetectorInput:
    H: np.ndarray
    y: np.ndarray
    constellation: Constellation
    noise_var: float | None = None

    def __post_init__(self):
        if self.H.ndim != 2 or self.y.shape != (self.H.shape[0],):  # noqa: PLR2004
            raise ContractViolation(
                f"channel {self.H.shape} and received vector {self.y.shape} disagree"
            )

    @classmethod
    def from_sample(cls, sample, constellation):
        return cls(
            H=sample.H_hat,
            y=sample.y,
            constellation=constellation,
            noise_var=sample.noise_var,
        )


@dataclass(frozen=True)
class DetectionResult:
    hard: SymbolFrame
    soft: np.ndarray | None = None
    logits: np.ndarray | None = None
    mults: int = 0
    diverged: bool = False
