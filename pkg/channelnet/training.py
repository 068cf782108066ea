"""Training ChannelNet on freshly simulated data.

Every batch is drawn from its own stream ``(seed, TRAIN_NAMESPACE, epoch, batch)``, so the
data never depends on how many worker threads generated it.
"""

from __future__ import annotations

import csv
import functools
import hashlib
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from channelnet.channel import ChannelScenario, simulate_batch
from channelnet.checkpoint import save_model
from channelnet.exceptions import (
    ConfigurationError,
    ForwardDivergedError,
    TrainingDivergedError,
)
from channelnet.modulation import SymbolFrame, build_constellation, complex_symbol_errors
from channelnet.network import ChannelNetModel, backward, forward
from channelnet.neural import AdamState, adam_step, softmax_xent
from channelnet.numerics import TRAIN_NAMESPACE, RngStream, make_stream_id
from channelnet.signals import epoch_completed
from channelnet.utils import default_threads, ordered_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LrSchedule:
    lr: float = 1e-3
    factor: float = 0.1
    every: int = 20


def lr_at(schedule: LrSchedule, epoch: int) -> float:
    if epoch < 0:
        raise ConfigurationError("epoch must be non-negative")
    return schedule.lr * schedule.factor ** (epoch // schedule.every)


@dataclass(frozen=True)
class TrainConfig:
    scenario: ChannelScenario
    snr_range_db: tuple[float, float] = (0.0, 20.0)
    epochs: int = 30
    samples_per_epoch: int = 200_000
    batch: int = 64
    schedule: LrSchedule = LrSchedule()
    seed: int = 0
    checkpoint_every: int = 1

    def __post_init__(self):
        lo, hi = self.snr_range_db
        if lo > hi:
            raise ConfigurationError(f"SNR range is reversed: [{lo}, {hi}]")
        if self.batch < 1 or self.samples_per_epoch % self.batch:
            raise ConfigurationError(
                f"batch {self.batch} must divide samples_per_epoch {self.samples_per_epoch}"
            )
        if not self.schedule.lr > 0 or self.schedule.every < 1:
            raise ConfigurationError("learning rate must be positive and decay every >= 1")
        if self.epochs < 0 or self.checkpoint_every < 1:
            raise ConfigurationError("epochs must be >= 0 and checkpoint_every >= 1")

    @property
    def batches_per_epoch(self):
        return self.samples_per_epoch // self.batch

    @property
    def constellation(self):
        return build_constellation(self.scenario.qam_order)


@dataclass(frozen=True)
class TrainingBatch:
    H: np.ndarray
    y: np.ndarray
    labels: np.ndarray
    x: np.ndarray
    snr_db: np.ndarray

    @property
    def inputs(self):
        return self.H, self.y

    def digest(self):
        sha = hashlib.sha256()
        for array in (self.H, self.y, self.labels, self.snr_db):
            sha.update(np.ascontiguousarray(array).tobytes())
        return sha.hexdigest()


def make_batch(config: TrainConfig, stream: RngStream) -> TrainingBatch:
    """Fresh channels and observations, each sample at its own uniform SNR."""
    lo, hi = config.snr_range_db
    snr_db = stream.uniform(lo, hi, config.batch)
    transmission = simulate_batch(
        config.scenario, config.constellation, snr_db, config.batch, stream
    )
    return TrainingBatch(
        H=transmission.H_hat,
        y=transmission.y,
        labels=transmission.frame.labels,
        x=transmission.frame.x,
        snr_db=snr_db,
    )


def batch_stream(config: TrainConfig, epoch: int, index: int) -> RngStream:
    return RngStream(config.seed, make_stream_id(TRAIN_NAMESPACE, epoch, index))


@dataclass(frozen=True)
class TrainEpoch:
    epoch: int
    loss: float
    ser_estimate: float
    lr: float
    seconds: float = field(default=0.0, compare=False)


@dataclass
class TrainLog:
    run: str = "channelnet"
    epochs: list[TrainEpoch] = field(default_factory=list)
    checkpoints: list[Path] = field(default_factory=list, compare=False)

    def to_csv(self, path):
        """Write the per-epoch curve. Only the ``seconds`` column varies between runs."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(["epoch", "loss", "ser_estimate", "lr", "seconds"])
            for record in self.epochs:
                writer.writerow(
                    [
                        record.epoch,
                        repr(record.loss),
                        repr(record.ser_estimate),
                        repr(record.lr),
                        repr(record.seconds),
                    ]
                )
        return path


def batch_loss(model: ChannelNetModel, batch: TrainingBatch) -> float:
    logits, _ = forward(model, batch.H, batch.y)
    loss, _ = softmax_xent(logits, batch.labels)
    return loss


def _snapshot(params):
    return {path: value.copy() for path, value in params.items()}


def _restore(params, snapshot):
    for path, value in params.items():
        value[...] = snapshot[path]


def train(  # noqa: PLR0913
    model: ChannelNetModel,
    config: TrainConfig,
    checkpoint_dir=None,
    run=None,
    threads=None,
    metadata=None,
):
    """Train ``model`` in place and return it with its :class:`TrainLog`."""
    if model.config.classes != config.constellation.classes:
        raise ConfigurationError(
            f"model has {model.config.classes} classes, scenario needs "
            f"{config.constellation.classes}"
        )
    threads = default_threads() if threads is None else threads
    log = TrainLog(run=run or config.scenario.digest)
    params = model.parameters()
    state = AdamState(lr=config.schedule.lr)
    good_params, good_checkpoint = _snapshot(params), None
    make = functools.partial(make_batch, config)
    symbols_per_batch = config.batch * config.scenario.n_t

    for epoch in range(config.epochs):
        state.lr = lr_at(config.schedule, epoch)
        started = time.perf_counter()
        total_loss, errors = 0.0, 0
        streams = (batch_stream(config, epoch, i) for i in range(config.batches_per_epoch))
        for batch in ordered_map(make, streams, threads):
            try:
                logits, cache = forward(model, batch.H, batch.y)
            except ForwardDivergedError as exc:
                _restore(params, good_params)
                raise TrainingDivergedError(epoch, good_checkpoint) from exc
            loss, d_logits = softmax_xent(logits, batch.labels)
            if not math.isfinite(loss):
                _restore(params, good_params)
                raise TrainingDivergedError(epoch, good_checkpoint)
            adam_step(state, params, backward(model, cache, d_logits))
            total_loss += loss
            predicted = SymbolFrame(x=batch.x, labels=np.argmax(logits, axis=-1))
            truth = SymbolFrame(x=batch.x, labels=batch.labels)
            errors += int(np.count_nonzero(complex_symbol_errors(truth, predicted)))

        record = TrainEpoch(
            epoch=epoch,
            loss=total_loss / config.batches_per_epoch,
            ser_estimate=errors / (symbols_per_batch * config.batches_per_epoch),
            lr=state.lr,
            seconds=time.perf_counter() - started,
        )
        log.epochs.append(record)
        logger.info(
            f"{log.run} epoch {epoch}: loss {record.loss:.5f}, "
            f"SER {record.ser_estimate:.3e}, lr {record.lr:.1e}, {record.seconds:.1f}s"
        )
        epoch_completed.send(sender=TrainEpoch, run=log.run, epoch=record)

        last = epoch == config.epochs - 1
        due = (epoch + 1) % config.checkpoint_every == 0 or last
        if checkpoint_dir is not None and due:
            good_checkpoint = save_model(
                model,
                Path(checkpoint_dir) / f"epoch-{epoch:03d}.chnet",
                {**(metadata or {}), "epochs": epoch + 1},
            )
            log.checkpoints.append(good_checkpoint)
        good_params = _snapshot(params)

    return model, log
