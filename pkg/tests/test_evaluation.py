import itertools
import math

import pytest

from channelnet.channel import ChannelScenario, NoiseKind
from channelnet.detectors.classic import amp_mults, detect_zf
from channelnet.evaluation import (
    CSV_HEADER,
    SweepRecord,
    ci95,
    ci_non_increasing,
    emit_records,
    mult_breakdown,
    parse_records,
    plot_records,
    robustness_variants,
    run_robustness,
    run_sweep,
)
from channelnet.exceptions import ContractViolation, RankDeficientChannelError
from channelnet.network import ChannelNetConfig, ChannelNetModel, channelnet_mults

QPSK_4X4 = ChannelScenario(n_r=4, n_t=4, qam_order=4)


def _record(detector, snr_db, errors, symbols=10_000):
    return SweepRecord.from_counts(
        detector, QPSK_4X4.digest, snr_db, symbols, errors, mults=10, seed=0
    )


def test_ci95():
    assert ci95(0.0, 1000) == 0.0
    assert ci95(0.5, 0) == 0.0
    assert ci95(0.1, 10_000) == pytest.approx(1.96 * math.sqrt(0.09 / 10_000))


class TestRecordFiles:
    def test_emit_and_parse(self, tmp_path):
        records = [_record("zf", 0.0, 1234), _record("zf", 2.5, 321)]
        path = emit_records(records, tmp_path / "out" / "sweep.csv")

        assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
        assert parse_records(path) == records

    def test_empty_emit(self, tmp_path):
        with pytest.raises(ContractViolation):
            emit_records([], tmp_path / "sweep.csv")

    def test_foreign_csv(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ContractViolation, match="not a sweep CSV"):
            parse_records(path)


class TestPlot:
    def test_svg_is_reproducible(self, tmp_path):
        points = [
            ("zf", 0, 900),
            ("zf", 5, 90),
            ("zf", 10, 0),
            ("mmse", 0, 700),
            ("mmse", 5, 40),
        ]
        records = [_record(*point) for point in points]
        first = plot_records(records, tmp_path / "a.svg")
        second = plot_records(records, tmp_path / "b.svg")

        assert first.read_bytes() == second.read_bytes()
        assert b"<svg" in first.read_bytes()

    def test_explicit_format(self, tmp_path):
        path = plot_records([_record("zf", 0, 10)], tmp_path / "curve", fmt="pdf")
        assert path.read_bytes().startswith(b"%PDF")

    def test_nothing_to_plot(self, tmp_path):
        with pytest.raises(ContractViolation):
            plot_records([], tmp_path / "a.svg")


def test_ci_non_increasing():
    assert ci_non_increasing([_record("zf", 10, 5), _record("zf", 0, 900)])
    # Within the combined interval widths.
    assert ci_non_increasing([_record("zf", 0, 100), _record("zf", 5, 110)])
    assert not ci_non_increasing([_record("zf", 0, 100), _record("zf", 5, 400)])


class TestSweep:
    options = {"min_errors": 50, "max_symbols": 2000, "batch": 32, "seed": 5}

    def test_records_are_ordered_and_bounded(self):
        records = run_sweep(["zf", "mmse"], QPSK_4X4, [0.0, 20.0], **self.options)

        assert [(r.detector, r.snr_db) for r in records] == [
            ("zf", 0.0),
            ("zf", 20.0),
            ("mmse", 0.0),
            ("mmse", 20.0),
        ]
        for record in records:
            assert record.scenario == QPSK_4X4.digest
            assert record.seed == 5
            assert record.symbols % QPSK_4X4.n_t == 0
            assert record.errors >= 50 or record.symbols >= 2000
            assert record.ser == record.errors / record.symbols

    def test_reproducible_and_thread_independent(self):
        snr_list = [0.0, 6.0, 12.0]
        first = run_sweep(["zf", "amp"], QPSK_4X4, snr_list, threads=1, **self.options)
        again = run_sweep(["zf", "amp"], QPSK_4X4, snr_list, threads=3, **self.options)
        assert first == again

    def test_ml_is_never_worse_than_zf(self):
        options = {**self.options, "min_errors": 10**9, "max_symbols": 2048}
        records = run_sweep(["zf", "ml"], QPSK_4X4, [4.0], **options)
        zf, ml = records

        assert zf.symbols == ml.symbols == 2048
        assert ml.errors <= zf.errors

    def test_ser_falls_with_snr(self):
        records = run_sweep(["mmse"], QPSK_4X4, [0.0, 5.0, 10.0], **self.options)
        assert ci_non_increasing(records)
        assert records[-1].ser < records[0].ser

    def test_needs_detectors_and_snr(self):
        with pytest.raises(ContractViolation):
            run_sweep([], QPSK_4X4, [0.0])
        with pytest.raises(ContractViolation):
            run_sweep(["zf"], QPSK_4X4, [])


class TestFailingDetector:
    @pytest.fixture
    def flaky(self):
        calls = itertools.count()

        def detector(detector_input):
            if next(calls) % 3 == 0:
                raise RankDeficientChannelError("singular")
            return detect_zf(detector_input)

        return {"flaky": detector}

    def test_failures_are_skipped_and_counted(self, flaky, settings, caplog):
        settings.CHANNELNET_PROPAGATE_EXCEPTIONS = False
        (record,) = run_sweep(
            flaky, QPSK_4X4, [10.0], min_errors=10**9, max_symbols=400, batch=30
        )

        assert record.skipped > 0
        assert record.symbols + record.skipped * QPSK_4X4.n_t >= 400
        assert "detector flaky failed on sample 0" in caplog.text

    def test_failures_propagate(self, flaky):
        with pytest.raises(RankDeficientChannelError):
            run_sweep(flaky, QPSK_4X4, [10.0], max_symbols=400, batch=30)


def test_robustness_variants():
    variants = robustness_variants(QPSK_4X4)
    assert variants[0] == QPSK_4X4
    assert [v.est_snr_db for v in variants[1:3]] == [15.0, 20.0]
    assert [v.noise for v in variants[3:]] == [NoiseKind.STUDENT_T, NoiseKind.LAPLACE]
    assert len({v.digest for v in variants}) == 5

    only_noise = robustness_variants(QPSK_4X4, est_snr_list=(), noise_kinds=["laplace"])
    assert [v.digest for v in only_noise] == [QPSK_4X4.digest, "rayleigh-4x4-4qam-laplace"]


def test_robustness_reuses_one_model():
    scenario = ChannelScenario(n_r=4, n_t=2, qam_order=4)
    model = ChannelNetModel(ChannelNetConfig(layers=2, features=3, classes=2), seed=1)
    before = {path: value.copy() for path, value in model.parameters().items()}

    records = run_robustness(
        model,
        scenario,
        [10.0],
        est_snr_list=(15.0,),
        noise_kinds=[NoiseKind.LAPLACE],
        min_errors=10,
        max_symbols=200,
        batch=20,
    )

    assert [r.detector for r in records] == ["channelnet-mlp"] * 3
    assert [r.scenario for r in records] == [
        "rayleigh-4x2-4qam-gaussian",
        "rayleigh-4x2-4qam-gaussian-est15dB",
        "rayleigh-4x2-4qam-laplace",
    ]
    for path, value in model.parameters().items():
        assert (before[path] == value).all()


def test_perfect_estimate_variant_matches_the_clean_run():
    scenario = ChannelScenario(n_r=4, n_t=2, qam_order=4)
    options = {"min_errors": 20, "max_symbols": 400, "batch": 16, "seed": 4}
    clean = run_sweep(["zf", "mmse"], scenario, [0.0, 8.0], **options)
    (variant,) = robustness_variants(scenario, est_snr_list=(math.inf,), noise_kinds=())[1:]
    assert run_sweep(["zf", "mmse"], variant, [0.0, 8.0], **options) == clean


def test_heavy_tailed_noise_costs_symbols_at_equal_snr():
    scenario = ChannelScenario(n_r=4, n_t=4, model="identity", qam_order=4)
    options = {"min_errors": 10**6, "max_symbols": 20_000, "batch": 500, "seed": 6}
    variants = robustness_variants(scenario, est_snr_list=())
    clean, *heavy = (
        run_sweep(["zf", "mmse"], variant, [12.0], **options) for variant in variants
    )
    for records in heavy:
        for before, after in zip(clean, records):
            assert after.ser - after.ci95 > before.ser + before.ci95, after


class TestMultBreakdown:
    def test_tags_add_up(self):
        total, tags = mult_breakdown("vblast", QPSK_4X4, samples=4, seed=3)
        assert total > 0
        assert sum(tags.values()) == pytest.approx(total)
        assert "gram" in tags

    def test_channelnet_against_amp_at_full_size(self):
        scenario = ChannelScenario(n_r=32, n_t=16, qam_order=16)
        config = ChannelNetConfig(layers=20, features=10, classes=4)

        channelnet, _ = mult_breakdown(
            "channelnet-mlp", scenario, 2, model=ChannelNetModel(config)
        )
        amp, amp_tags = mult_breakdown("amp", scenario, 2)

        assert channelnet == channelnet_mults(config, 64, 32) == 1_175_040
        assert amp == amp_mults(64, 32, 4, 50) == 251_300
        # About 4.7x, above the 1.5-4x band; see "Complexity band" in DESIGN.md.
        assert channelnet / amp == pytest.approx(4.676, abs=1e-3)
        assert "channel" in amp_tags
