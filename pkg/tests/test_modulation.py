import numpy as np
import pytest

from channelnet.exceptions import ConfigurationError, ContractViolation
from channelnet.modulation import (
    SymbolFrame,
    build_constellation,
    complex_symbol_errors,
    dimension_error_rate,
    draw_symbols,
    frame_from_labels,
    slice_symbols,
    symbol_errors,
)


@pytest.mark.parametrize(("order", "classes"), [(4, 2), (16, 4), (64, 8), (256, 16)])
def test_unit_average_energy(order, classes):
    constellation = build_constellation(order)
    assert constellation.classes == classes
    # Two PAM dimensions per complex symbol.
    assert 2 * np.mean(np.square(constellation.pam_levels)) == pytest.approx(1.0)
    np.testing.assert_allclose(constellation.pam_levels, -constellation.pam_levels[::-1])


def test_qpsk_levels(qpsk):
    np.testing.assert_allclose(qpsk.pam_levels, [-1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert qpsk.name == "qpsk"


@pytest.mark.parametrize("order", [2, 8, 32, 1024])
def test_unsupported_order(order):
    with pytest.raises(ConfigurationError, match="unsupported QAM order"):
        build_constellation(order)


def test_levels_are_read_only(qam16):
    with pytest.raises(ValueError, match="read-only"):
        qam16.pam_levels[0] = 0.0


class TestSlice:
    def test_levels_map_to_themselves(self, qam16):
        frame = slice_symbols(qam16, qam16.pam_levels)
        np.testing.assert_array_equal(frame.labels, [0, 1, 2, 3])
        np.testing.assert_array_equal(frame.x, qam16.pam_levels)

    def test_ties_go_to_the_lower_level(self, qam16):
        midpoints = (qam16.pam_levels[:-1] + qam16.pam_levels[1:]) / 2
        np.testing.assert_array_equal(slice_symbols(qam16, midpoints).labels, [0, 1, 2])

    def test_outside_values_clip(self, qam16):
        frame = slice_symbols(qam16, np.array([-100.0, 100.0]))
        np.testing.assert_array_equal(frame.labels, [0, 3])

    def test_nearest_level(self, qam16, stream):
        u = stream.uniform(-2.0, 2.0, 200)
        expected = np.argmin(np.abs(u[:, None] - qam16.pam_levels), axis=1)
        np.testing.assert_array_equal(slice_symbols(qam16, u).labels, expected)


class TestErrors:
    def test_pairs_real_and_imaginary_dimensions(self, qpsk):
        truth = frame_from_labels(qpsk, [0, 1, 0, 1])
        # Dimensions 0 and 2 belong to the first complex symbol.
        est = frame_from_labels(qpsk, [1, 1, 1, 1])
        np.testing.assert_array_equal(complex_symbol_errors(truth, est), [True, False])
        assert symbol_errors(truth, est) == 1
        assert dimension_error_rate(truth, est) == 0.5

    def test_batched_frames(self, qpsk):
        truth = frame_from_labels(qpsk, np.zeros((3, 4), dtype=int))
        est = frame_from_labels(qpsk, [[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 1]])
        assert symbol_errors(truth, est) == 2

    def test_shape_mismatch(self, qpsk):
        with pytest.raises(ContractViolation):
            symbol_errors(frame_from_labels(qpsk, [0, 0]), frame_from_labels(qpsk, [0] * 4))

    def test_odd_length(self, qpsk):
        frame = SymbolFrame(x=np.zeros(3), labels=np.zeros(3, dtype=int))
        with pytest.raises(ContractViolation, match="even"):
            symbol_errors(frame, frame)


def test_draw_symbols(qam16, stream):
    frame = draw_symbols(qam16, 8, stream, batch=500)
    assert frame.labels.shape == (500, 8)
    np.testing.assert_array_equal(frame.x, qam16.pam_levels[frame.labels])
    assert set(np.unique(frame.labels)) == {0, 1, 2, 3}
    with pytest.raises(ContractViolation):
        draw_symbols(qam16, 0, stream)
