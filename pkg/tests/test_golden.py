"""Bit-level regressions against values stored under ``tests/golden``.

A change to any of these means previously published seeds no longer reproduce; update
the stored file only on purpose.
"""

import hashlib

import numpy as np

from channelnet.channel import ChannelScenario, simulate_batch
from channelnet.evaluation import emit_records, run_sweep
from channelnet.modulation import build_constellation, draw_symbols
from channelnet.numerics import MISC_NAMESPACE, RngStream, gaussian, make_stream_id
from channelnet.training import TrainConfig, batch_stream, make_batch

SCENARIO = ChannelScenario(n_r=4, n_t=2, qam_order=4)


def _sha256(*arrays):
    sha = hashlib.sha256()
    for array in arrays:
        sha.update(np.ascontiguousarray(array).tobytes())
    return sha.hexdigest()


def test_gaussian(golden):
    golden("gaussian_seed0_stream0", gaussian(RngStream(0, 0), 4).tolist())


def test_draw_symbols(golden):
    frame = draw_symbols(build_constellation(4), 2, RngStream(0, 0))
    golden("draw_symbols_qpsk_k2", {"labels": frame.labels.tolist(), "x": frame.x.tolist()})


def test_simulate_batch(golden, qpsk):
    scenario = SCENARIO.replace(est_snr_db=15.0, noise="student_t")
    stream = RngStream(0, make_stream_id(MISC_NAMESPACE))
    batch = simulate_batch(scenario, qpsk, 10.0, 4, stream)
    digest = _sha256(batch.H, batch.H_hat, batch.y, batch.noise, batch.frame.labels)
    golden("simulate_batch_digest", digest)


def test_make_batch(golden):
    config = TrainConfig(SCENARIO, samples_per_epoch=16, batch=8, seed=3)
    golden("make_batch_digest", make_batch(config, batch_stream(config, 0, 1)).digest())


def test_sweep_csv(golden, tmp_path):
    records = run_sweep(
        ["zf", "mmse", "vblast"],
        SCENARIO,
        [0.0, 6.0],
        min_errors=20,
        max_symbols=400,
        batch=16,
        seed=9,
        threads=1,
    )
    path = emit_records(records, tmp_path / "sweep.csv")
    golden("small_sweep_csv", path.read_text().splitlines())
