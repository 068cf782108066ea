"""Desk-scale reproductions. Minutes to an hour each; run with ``--runslow``."""

import pytest

from channelnet.channel import ChannelScenario
from channelnet.evaluation import run_robustness, run_sweep
from channelnet.network import ChannelNetConfig, ChannelNetModel
from channelnet.training import TrainConfig, train
from channelnet.utils import default_threads

pytestmark = pytest.mark.slow

LARGE = ChannelScenario(n_r=32, n_t=16, qam_order=16)


def test_exhaustive_search_dominates_every_baseline():
    scenario = ChannelScenario(n_r=4, n_t=4, qam_order=4)
    detectors = ["zf", "mmse", "vblast", "amp", "ml"]
    records = run_sweep(
        detectors,
        scenario,
        [4.0, 8.0, 12.0],
        min_errors=10**12,
        max_symbols=4 * 10**4,
        batch=500,
        seed=17,
        threads=default_threads(),
    )
    by_point = {(r.detector, r.snr_db): r for r in records}

    for snr_db in (4.0, 8.0, 12.0):
        ml = by_point["ml", snr_db]
        assert ml.symbols == 4 * 10**4
        for name in ("zf", "mmse", "vblast", "amp"):
            assert ml.errors <= by_point[name, snr_db].errors, (name, snr_db)
        assert by_point["mmse", snr_db].ser <= by_point["zf", snr_db].ser


@pytest.fixture(scope="module")
def trained_model():
    model = ChannelNetModel(ChannelNetConfig(layers=20, features=10, classes=4), seed=0)
    config = TrainConfig(
        scenario=LARGE, snr_range_db=(0.0, 20.0), epochs=30, samples_per_epoch=200_000
    )
    model, _ = train(model, config, threads=default_threads())
    return model


def _mmse_band_points(snr_list):
    records = run_sweep(["mmse"], LARGE, snr_list, seed=3, threads=default_threads())
    return [r.snr_db for r in records if 1e-2 <= r.ser <= 1e-1]


def test_trained_model_beats_mmse(trained_model):
    snr_points = _mmse_band_points([float(snr) for snr in range(0, 22, 2)])
    assert snr_points

    records = run_sweep(
        ["mmse", "amp", "channelnet-mlp"],
        LARGE,
        snr_points,
        model=trained_model,
        seed=3,
        threads=default_threads(),
    )
    by_point = {(r.detector, r.snr_db): r for r in records}
    for snr_db in snr_points:
        mmse = by_point["mmse", snr_db]
        amp = by_point["amp", snr_db]
        channelnet = by_point["channelnet-mlp", snr_db]
        assert channelnet.ser <= 0.5 * mmse.ser, snr_db
        assert channelnet.ser >= amp.ser - 2 * channelnet.ci95, snr_db


def test_estimation_error_ordering(trained_model):
    records = run_robustness(
        trained_model,
        LARGE,
        [8.0, 12.0],
        seed=4,
        est_snr_list=(15.0, 20.0),
        noise_kinds=(),
        min_errors=10**12,
        max_symbols=10**5,
        threads=default_threads(),
    )
    by_point = {(r.scenario, r.snr_db): r for r in records}
    clean, est20, est15 = (
        LARGE.digest,
        LARGE.replace(est_snr_db=20.0).digest,
        LARGE.replace(est_snr_db=15.0).digest,
    )

    def not_better(worse, better):
        return worse.ser >= better.ser - worse.ci95 - better.ci95

    for snr_db in (8.0, 12.0):
        assert by_point[clean, snr_db].symbols >= 10**5
        assert not_better(by_point[est15, snr_db], by_point[est20, snr_db])
        assert not_better(by_point[est20, snr_db], by_point[clean, snr_db])
