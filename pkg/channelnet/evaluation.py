"""Monte Carlo SER sweeps, robustness runs, multiplication audits and result files.

All detectors in a sweep see the same samples at each SNR. Samples for SNR index ``i`` and
batch ``j`` come from the stream ``(seed, EVAL_NAMESPACE, i, j)``, so a sweep is
reproducible regardless of thread count and two sweeps over the same SNR list are paired.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from channelnet import numerics
from channelnet.channel import ChannelScenario, NoiseKind, simulate_batch
from channelnet.detectors import get_detector
from channelnet.detectors.base import DetectorInput
from channelnet.exceptions import ChannelNetError, ContractViolation
from channelnet.modulation import build_constellation, symbol_errors
from channelnet.numerics import EVAL_NAMESPACE, MISC_NAMESPACE, RngStream, make_stream_id
from channelnet.settings import SWEEP_BATCH, SWEEP_MAX_SYMBOLS, SWEEP_MIN_ERRORS
from channelnet.signals import sweep_record_ready
from channelnet.utils import default_threads, ordered_map, should_propagate_exceptions

logger = logging.getLogger(__name__)

CSV_HEADER = [
    "detector",
    "scenario",
    "snr_db",
    "symbols",
    "errors",
    "ser",
    "ci95",
    "mults",
    "seed",
]


def ci95(ser, symbols):
    """Half-width of the normal-approximation binomial 95% interval."""
    if symbols == 0:
        return 0.0
    return 1.96 * math.sqrt(ser * (1.0 - ser) / symbols)


@dataclass(frozen=True)
class SweepRecord:
    detector: str
    scenario: str
    snr_db: float
    symbols: int
    errors: int
    ser: float
    ci95: float
    mults: int
    seed: int
    skipped: int = field(default=0, compare=False)

    @classmethod
    def from_counts(cls, detector, scenario, snr_db, symbols, errors, **extra):
        ser = errors / symbols if symbols else 0.0
        return cls(
            detector=detector,
            scenario=scenario,
            snr_db=float(snr_db),
            symbols=symbols,
            errors=errors,
            ser=ser,
            ci95=ci95(ser, symbols),
            **extra,
        )


@dataclass
class _Tally:
    errors: int = 0
    symbols: int = 0
    skipped: int = 0
    detections: int = 0
    mults: int = 0


def _resolve_detectors(detectors, model):
    if not detectors:
        raise ContractViolation("a sweep needs at least one detector")
    if isinstance(detectors, dict):
        return dict(detectors)
    return {name: get_detector(name, model) for name in detectors}


def handle_detection_exception(name, sample_index):
    logger.exception(f"detector {name} failed on sample {sample_index}; skipping it")
    if should_propagate_exceptions():
        raise


def _sweep_point(detectors, scenario, constellation, snr_index, snr_db, options):
    min_errors, max_symbols, batch, seed = options
    tallies = {name: _Tally() for name in detectors}
    active = list(detectors)
    batch_index = 0
    while active:
        stream = RngStream(seed, make_stream_id(EVAL_NAMESPACE, snr_index, batch_index))
        samples = simulate_batch(scenario, constellation, snr_db, batch, stream)
        for name in active:
            detector, tally = detectors[name], tallies[name]
            for index, sample in enumerate(samples):
                detector_input = DetectorInput.from_sample(sample, constellation)
                try:
                    with numerics.count_mults() as counter:
                        result = detector(detector_input)
                except ChannelNetError:
                    handle_detection_exception(name, batch_index * batch + index)
                    tally.skipped += 1
                    continue
                tally.errors += symbol_errors(sample.frame, result.hard)
                tally.symbols += scenario.n_t
                tally.detections += 1
                tally.mults += counter.multiplies
        active = [
            name
            for name in active
            if tallies[name].errors < min_errors
            and tallies[name].symbols + tallies[name].skipped * scenario.n_t < max_symbols
        ]
        batch_index += 1
    logger.info(f"{scenario.digest} at {snr_db:g} dB done after {batch_index} batches")
    return {
        name: SweepRecord.from_counts(
            name,
            scenario.digest,
            snr_db,
            tally.symbols,
            tally.errors,
            mults=round(tally.mults / tally.detections) if tally.detections else 0,
            seed=seed,
            skipped=tally.skipped,
        )
        for name, tally in tallies.items()
    }


def run_sweep(  # noqa: PLR0913
    detectors,
    scenario: ChannelScenario,
    snr_list,
    min_errors=None,
    max_symbols=None,
    seed=0,
    model=None,
    batch=None,
    threads=None,
):
    """Measure SER for every (detector, SNR) pair.

    ``detectors`` is a list of registered names (``model`` serves the ``channelnet-*``
    names) or a mapping of name to callable. Records are ordered detector-major, then by
    SNR in the given order.
    """
    detectors = _resolve_detectors(detectors, model)
    snr_list = list(snr_list)
    if not snr_list:
        raise ContractViolation("a sweep needs at least one SNR point")
    options = (
        SWEEP_MIN_ERRORS if min_errors is None else min_errors,
        SWEEP_MAX_SYMBOLS if max_symbols is None else max_symbols,
        SWEEP_BATCH if batch is None else batch,
        seed,
    )
    constellation = build_constellation(scenario.qam_order)
    threads = default_threads() if threads is None else threads

    def point(cell):
        snr_index, snr_db = cell
        return _sweep_point(detectors, scenario, constellation, snr_index, snr_db, options)

    points = list(ordered_map(point, enumerate(snr_list), threads))
    records = [point_records[name] for name in detectors for point_records in points]
    for record in records:
        sweep_record_ready.send(sender=SweepRecord, record=record)
    return records


def robustness_variants(scenario, est_snr_list=(15.0, 20.0), noise_kinds=None):
    """The clean scenario, its estimation-error variants, then its heavy-tailed variants."""
    if noise_kinds is None:
        noise_kinds = (NoiseKind.STUDENT_T, NoiseKind.LAPLACE)
    variants = [scenario]
    variants += [scenario.replace(est_snr_db=float(est)) for est in est_snr_list]
    variants += [scenario.replace(noise=kind) for kind in noise_kinds]
    return variants


def run_robustness(  # noqa: PLR0913
    model,
    scenario: ChannelScenario,
    snr_list,
    seed=0,
    est_snr_list=(15.0, 20.0),
    noise_kinds=None,
    detectors=None,
    **sweep_options,
):
    """Evaluate one trained model, unchanged, across the robustness variants."""
    detectors = detectors or [f"channelnet-{model.config.variant}"]
    records = []
    for variant in robustness_variants(scenario, est_snr_list, noise_kinds):
        records += run_sweep(
            detectors, variant, snr_list, seed=seed, model=model, **sweep_options
        )
    return records


def mult_breakdown(detector, scenario, samples, seed=0, model=None, snr_db=10.0):
    """Mean multiplies per detection, in total and by tag."""
    if isinstance(detector, str):
        detector = get_detector(detector, model)
    constellation = build_constellation(scenario.qam_order)
    stream = RngStream(seed, make_stream_id(MISC_NAMESPACE))
    transmissions = simulate_batch(scenario, constellation, snr_db, samples, stream)
    totals = Counter()
    total = 0
    for sample in transmissions:
        with numerics.count_mults() as counter:
            detector(DetectorInput.from_sample(sample, constellation))
        total += counter.multiplies
        totals.update(counter.tags)
    breakdown = {tag: count / samples for tag, count in totals.items()}
    return total / samples, breakdown


def count_mults(detector, scenario, samples, seed=0, model=None, snr_db=10.0):
    return mult_breakdown(detector, scenario, samples, seed, model, snr_db)[0]


def emit_records(records, path):
    """Write records as CSV; floats use their shortest round-tripping representation."""
    if not records:
        raise ContractViolation("no records to emit")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(
                [
                    record.detector,
                    record.scenario,
                    repr(record.snr_db),
                    record.symbols,
                    record.errors,
                    repr(record.ser),
                    repr(record.ci95),
                    record.mults,
                    record.seed,
                ]
            )
    return path


def parse_records(path):
    with Path(path).open(newline="") as stream:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ContractViolation(f"{path} is not a sweep CSV (header {header})")
        return [
            SweepRecord(
                detector=row[0],
                scenario=row[1],
                snr_db=float(row[2]),
                symbols=int(row[3]),
                errors=int(row[4]),
                ser=float(row[5]),
                ci95=float(row[6]),
                mults=int(row[7]),
                seed=int(row[8]),
            )
            for row in reader
        ]


def plot_records(records, path, fmt=None):
    """SER against SNR on a log scale, one curve per detector (and scenario)."""
    import matplotlib as mpl
    from matplotlib.figure import Figure

    if not records:
        raise ContractViolation("no records to plot")
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".") or "svg"
    scenarios = {record.scenario for record in records}
    curves = {}
    for record in records:
        label = record.detector
        if len(scenarios) > 1:
            label = f"{record.detector} ({record.scenario})"
        curves.setdefault(label, []).append(record)

    figure = Figure(figsize=(6.4, 4.8))
    axes = figure.add_subplot()
    for label, points in curves.items():
        points = sorted(points, key=lambda record: record.snr_db)
        snr = [record.snr_db for record in points]
        ser = np.array([record.ser if record.ser > 0 else np.nan for record in points])
        axes.semilogy(snr, ser, marker="o", label=label)
    axes.set_xlabel("SNR (dB)")
    axes.set_ylabel("SER")
    axes.grid(visible=True, which="both", alpha=0.3)
    axes.legend()
    metadata = {"svg": {"Date": None}, "pdf": {"CreationDate": None}}.get(fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    # Fixed salt keeps SVG element ids stable across runs.
    with mpl.rc_context({"svg.hashsalt": "channelnet"}):
        figure.savefig(path, format=fmt, metadata=metadata)
    return path


def ci_non_increasing(records):
    """Whether SER never rises with SNR by more than the combined confidence widths."""
    ordered = sorted(records, key=lambda record: record.snr_db)
    return all(
        later.ser <= earlier.ser + earlier.ci95 + later.ci95
        for earlier, later in zip(ordered, ordered[1:])
    )
