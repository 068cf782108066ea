"""Real-matrix arithmetic, reproducible random streams and multiplication accounting.

Matrices are plain C-contiguous ``float64`` numpy arrays. Every multiply that matters for
the complexity audit goes through :func:`matmul`, :func:`solve_spd` or :func:`tally`, which
report to the :class:`MultCounter` scopes active in the current context.
"""

from __future__ import annotations

import contextlib
import contextvars
import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy import linalg

from channelnet.exceptions import ContractViolation, NotSPDError

logger = logging.getLogger(__name__)

RealMatrix = npt.NDArray[np.float64]
RealVector = npt.NDArray[np.float64]

# Stream-id namespaces. Training and evaluation never share a namespace.
TRAIN_NAMESPACE = 1
EVAL_NAMESPACE = 2
INIT_NAMESPACE = 3
MISC_NAMESPACE = 4

_INDEX_BITS = 28


def make_stream_id(namespace, *indices):
    """Pack a namespace and up to two indices into one 64-bit stream id."""
    if len(indices) > 2:  # noqa: PLR2004
        raise ContractViolation("at most two stream indices are supported")
    stream_id = namespace
    for index in (*indices, 0, 0)[:2]:
        if not 0 <= index < 1 << _INDEX_BITS:
            raise ContractViolation(f"stream index {index} out of range")
        stream_id = (stream_id << _INDEX_BITS) | index
    return stream_id


class RngStream:
    """A single-owner random stream keyed by ``(seed, stream_id)``.

    Backed by the counter-based Philox bit generator, so any number of streams can be
    derived from one seed without coordination.
    """

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def gaussian(self, shape):
        return self.generator.standard_normal(shape)

    def uniform(self, low, high, shape=None):
        return self.generator.uniform(low, high, shape)

    def integers(self, high, shape):
        return self.generator.integers(0, high, shape)


def gaussian(stream: RngStream, n: int) -> RealVector:
    if n < 1:
        raise ContractViolation("gaussian() needs n >= 1")
    return stream.gaussian(n)


@dataclass
class MultCounter:
    multiplies: int = 0
    tags: Counter = field(default_factory=Counter)

    def add(self, count, tag):
        self.multiplies += count
        self.tags[tag] += count


_active_counters: contextvars.ContextVar[tuple[MultCounter, ...]] = contextvars.ContextVar(
    "channelnet_mult_counters", default=()
)


@contextlib.contextmanager
def count_mults():
    """Open a measurement scope; nested scopes all see the multiplies done inside them."""
    counter = MultCounter()
    token = _active_counters.set((*_active_counters.get(), counter))
    try:
        yield counter
    finally:
        _active_counters.reset(token)


@contextlib.contextmanager
def nested_scope():
    """Yield a fresh counter if a measurement is running, else ``None``."""
    if not _active_counters.get():
        yield None
        return
    with count_mults() as counter:
        yield counter


def measuring():
    return bool(_active_counters.get())


def tally(count, tag="other"):
    for counter in _active_counters.get():
        counter.add(int(count), tag)


def matmul(A: RealMatrix, B: RealMatrix, tag="matmul") -> RealMatrix:
    """Matrix product with numpy broadcasting over leading batch axes."""
    if A.ndim < 2 or B.ndim < 2 or A.shape[-1] != B.shape[-2]:  # noqa: PLR2004
        raise ContractViolation(f"cannot multiply {A.shape} by {B.shape}")
    out = np.matmul(A, B)
    if measuring():
        batch = int(np.prod(out.shape[:-2], dtype=np.int64))
        tally(batch * A.shape[-2] * A.shape[-1] * B.shape[-1], tag)
    return out


def spd_solve_mults(n, nrhs):
    """Multiplies and divisions of a Cholesky factorization plus two triangular solves."""
    factor = (n**3 - n) // 6 + n * (n - 1) // 2
    return factor + nrhs * n * (n + 1)


def solve_spd(A: RealMatrix, B: RealMatrix, tag="solve") -> RealMatrix:
    if A.ndim != 2 or A.shape[0] != A.shape[1] or B.shape[0] != A.shape[0]:  # noqa: PLR2004
        raise ContractViolation(f"cannot solve {A.shape} system for {B.shape}")
    try:
        factor = linalg.cho_factor(A, lower=True, check_finite=True)
    except linalg.LinAlgError as exc:
        raise NotSPDError("matrix not SPD") from exc
    X = linalg.cho_solve(factor, B)
    nrhs = 1 if B.ndim == 1 else B.shape[1]
    tally(spd_solve_mults(A.shape[0], nrhs), tag)
    return X


def lift_complex(H_c) -> RealMatrix:
    """Real-valued form of a complex matrix ([[Re, -Im], [Im, Re]]) or vector ([Re; Im])."""
    H_c = np.asarray(H_c, dtype=np.complex128)
    if H_c.ndim == 1:
        return np.concatenate([H_c.real, H_c.imag])
    re, im = H_c.real, H_c.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.ascontiguousarray(np.concatenate([top, bottom], axis=-2))


def unlift_matrix(H: RealMatrix):
    n_r, n_t = H.shape[-2] // 2, H.shape[-1] // 2
    return H[..., :n_r, :n_t] + 1j * H[..., n_r:, :n_t]
