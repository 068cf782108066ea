"""Classical baseline detectors: ZF, MMSE, AMP, V-BLAST and exhaustive ML.

Every detector takes a :class:`DetectorInput` and returns a :class:`DetectionResult`.
Multiplies go through the instrumented ops in :mod:`channelnet.numerics`, so running a
detector inside :func:`channelnet.numerics.count_mults` yields its cost.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.special import softmax

from channelnet.detectors.base import DetectionResult, DetectorInput
from channelnet.exceptions import (
    ConfigurationError,
    InstanceTooLargeError,
    NotSPDError,
    RankDeficientChannelError,
)
from channelnet.modulation import slice_symbols
from channelnet.numerics import matmul, nested_scope, solve_spd, tally
from channelnet.settings import AMP_ITERATIONS, ML_MAX_CANDIDATES

logger = logging.getLogger(__name__)

_TAU_FLOOR = 1e-12
_ML_CHUNK = 1 << 15
# Row norms this close count as one ordering step.
_ORDER_TIE_RTOL = 1e-9


def _require_noise_var(detector_input, name):
    if detector_input.noise_var is None:
        raise ConfigurationError(f"the {name} detector needs the noise variance")
    return float(detector_input.noise_var)


def _regularized_solve(H, y, regularizer):
    gram = matmul(H.T, H, tag="gram")
    if regularizer:
        gram = gram + regularizer * np.eye(H.shape[1])
    rhs = matmul(H.T, y[:, None], tag="matched_filter")
    try:
        return solve_spd(gram, rhs)[:, 0]
    except NotSPDError as exc:
        raise RankDeficientChannelError(
            "rank-deficient channel: HᵀH is singular"
        ) from exc


def detect_zf(detector_input: DetectorInput) -> DetectionResult:
    with nested_scope() as counter:
        soft = _regularized_solve(detector_input.H, detector_input.y, 0.0)
    return DetectionResult(
        hard=slice_symbols(detector_input.constellation, soft),
        soft=soft,
        mults=counter.multiplies if counter else 0,
    )


def detect_mmse(detector_input: DetectorInput) -> DetectionResult:
    noise_var = _require_noise_var(detector_input, "MMSE")
    with nested_scope() as counter:
        soft = _regularized_solve(detector_input.H, detector_input.y, noise_var)
    return DetectionResult(
        hard=slice_symbols(detector_input.constellation, soft),
        soft=soft,
        mults=counter.multiplies if counter else 0,
    )


def _posterior(u, tau2, levels):
    """Per-entry posterior mean and variance of a uniform PAM prior under N(0, tau2)."""
    weights = softmax(-np.square(u[:, None] - levels) / (2.0 * tau2), axis=1)
    mean = weights @ levels
    variance = np.sum(weights * np.square(levels - mean[:, None]), axis=1)
    tally(u.size * (6 * levels.size + 1), "denoiser")
    return mean, variance


def amp_mults(N, K, classes, iters):
    """Closed-form multiply count of :func:`detect_amp` when it runs all iterations."""
    return iters * (2 * N * K + K * (6 * classes + 1) + 2 * N + 2)


def detect_amp(detector_input: DetectorInput, iters=None) -> DetectionResult:
    """Approximate message passing with a finite-alphabet posterior-mean denoiser.

    The residual carries the Onsager correction ``b * r_prev`` with ``b`` the mean
    denoiser derivative scaled by K/N. The effective noise is tracked as ‖r‖²/N.
    """
    noise_var = _require_noise_var(detector_input, "AMP")
    iters = AMP_ITERATIONS if iters is None else iters
    H, y = detector_input.H, detector_input.y
    levels = detector_input.constellation.pam_levels
    N, K = H.shape
    tau_floor = max(noise_var, _TAU_FLOOR)

    x = np.zeros(K)
    r = y.copy()
    diverged = False
    with nested_scope() as counter, np.errstate(over="ignore", invalid="ignore"):
        for iteration in range(iters):
            u = x + matmul(H.T, r[:, None], tag="channel")[:, 0]
            tau2 = max(float(r @ r) / N, tau_floor)
            tally(N + 1, "residual")
            if not (np.isfinite(u).all() and np.isfinite(tau2)):
                diverged = True
                logger.warning(f"AMP diverged at iteration {iteration}")
                break
            x_next, variance = _posterior(u, tau2, levels)
            if not np.isfinite(x_next).all():
                diverged = True
                logger.warning(f"AMP diverged at iteration {iteration}")
                break
            x = x_next
            onsager = float(np.sum(variance)) / (tau2 * N)
            r = y - matmul(H, x[:, None], tag="channel")[:, 0] + onsager * r
            tally(N + 1, "onsager")

    return DetectionResult(
        hard=slice_symbols(detector_input.constellation, x),
        soft=x,
        mults=counter.multiplies if counter else 0,
        diverged=diverged,
    )


def detect_vblast(detector_input: DetectorInput) -> DetectionResult:
    """Ordered ZF successive interference cancellation.

    Each stage equalizes the remaining columns and detects every stream whose
    pseudo-inverse row norm ties the smallest one. Those streams are cancelled from the
    residual together and their columns dropped. On a lifted channel the real and
    imaginary rows of a complex user always tie, so users are detected as a whole and
    the result does not depend on the column order.
    """
    H = detector_input.H
    constellation = detector_input.constellation
    y_res = detector_input.y.copy()
    remaining = np.arange(H.shape[1])
    soft = np.empty(H.shape[1])

    with nested_scope() as counter:
        while remaining.size:
            H_r = H[:, remaining]
            gram = matmul(H_r.T, H_r, tag="gram")
            try:
                pinv = solve_spd(gram, np.ascontiguousarray(H_r.T))
            except NotSPDError as exc:
                raise RankDeficientChannelError(
                    "rank-deficient channel: HᵀH is singular"
                ) from exc
            row_norms = np.sum(np.square(pinv), axis=1)
            tally(pinv.size, "ordering")
            picked = row_norms <= row_norms.min() * (1.0 + _ORDER_TIE_RTOL)
            columns = remaining[picked]
            estimates = pinv[picked] @ y_res
            symbols = slice_symbols(constellation, estimates).x
            y_res = y_res - H[:, columns] @ symbols
            tally(2 * H.shape[0] * columns.size, "cancel")
            soft[columns] = estimates
            remaining = remaining[~picked]

    return DetectionResult(
        hard=slice_symbols(constellation, soft),
        soft=soft,
        mults=counter.multiplies if counter else 0,
    )


def detect_ml(detector_input: DetectorInput, max_candidates=None) -> DetectionResult:
    """Exhaustive search over every lifted symbol vector.

    Candidates are visited in lexicographic label order and only a strictly smaller
    objective replaces the incumbent, so ties resolve to the lexicographically first.
    """
    H, y = detector_input.H, detector_input.y
    constellation = detector_input.constellation
    N, K = H.shape
    classes = constellation.classes
    cap = ML_MAX_CANDIDATES if max_candidates is None else max_candidates
    total = classes**K
    if total > cap:
        raise InstanceTooLargeError(
            f"exhaustive ML over {total} candidates exceeds the cap of {cap}"
        )

    powers = classes ** np.arange(K - 1, -1, -1, dtype=np.int64)
    best_labels, best_objective = None, np.inf
    with nested_scope() as counter:
        for start in range(0, total, _ML_CHUNK):
            index = np.arange(start, min(start + _ML_CHUNK, total), dtype=np.int64)
            labels = (index[:, None] // powers) % classes
            residual = y - matmul(constellation.pam_levels[labels], H.T, tag="candidates")
            objective = np.sum(np.square(residual), axis=1)
            tally(residual.size, "objective")
            winner = int(np.argmin(objective))
            if objective[winner] < best_objective:
                best_objective = objective[winner]
                best_labels = labels[winner]

    hard = slice_symbols(constellation, constellation.pam_levels[best_labels])
    return DetectionResult(hard=hard, mults=counter.multiplies if counter else 0)
