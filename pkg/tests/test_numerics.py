import math

import numpy as np
import pytest

from channelnet.exceptions import ContractViolation, NotSPDError
from channelnet.numerics import (
    EVAL_NAMESPACE,
    TRAIN_NAMESPACE,
    RngStream,
    count_mults,
    gaussian,
    lift_complex,
    make_stream_id,
    matmul,
    measuring,
    solve_spd,
    spd_solve_mults,
    tally,
    unlift_matrix,
)
from channelnet.units import db_to_linear, linear_to_db


class TestStreams:
    def test_stream_ids_are_distinct(self):
        ids = {
            make_stream_id(namespace, a, b)
            for namespace in (TRAIN_NAMESPACE, EVAL_NAMESPACE)
            for a in range(4)
            for b in range(4)
        }
        assert len(ids) == 32

    @pytest.mark.parametrize("indices", [(-1,), (1 << 28,), (1, 2, 3)])
    def test_bad_stream_indices(self, indices):
        with pytest.raises(ContractViolation):
            make_stream_id(TRAIN_NAMESPACE, *indices)

    def test_same_key_same_draws(self):
        first = RngStream(7, make_stream_id(EVAL_NAMESPACE, 2, 3))
        second = RngStream(7, make_stream_id(EVAL_NAMESPACE, 2, 3))
        np.testing.assert_array_equal(gaussian(first, 50), gaussian(second, 50))

    def test_sibling_streams_differ(self):
        first = RngStream(7, make_stream_id(EVAL_NAMESPACE, 2, 3))
        second = RngStream(7, make_stream_id(EVAL_NAMESPACE, 2, 4))
        assert not np.array_equal(gaussian(first, 50), gaussian(second, 50))

    def test_gaussian_needs_positive_length(self, stream):
        with pytest.raises(ContractViolation):
            gaussian(stream, 0)


class TestMultCounting:
    def test_matmul_counts_m_k_n(self, stream):
        A, B = stream.gaussian((3, 4)), stream.gaussian((4, 5))
        with count_mults() as counter:
            np.testing.assert_allclose(matmul(A, B, tag="gram"), A @ B)
        assert counter.multiplies == 60
        assert counter.tags == {"gram": 60}

    def test_batched_matmul(self, stream):
        with count_mults() as counter:
            matmul(stream.gaussian((7, 3, 4)), stream.gaussian((4, 2)))
        assert counter.multiplies == 7 * 3 * 4 * 2

    def test_nested_scopes_both_count(self, stream):
        A = stream.gaussian((2, 2))
        with count_mults() as outer:
            matmul(A, A)
            with count_mults() as inner:
                tally(5, "denoiser")
        assert inner.multiplies == 5
        assert outer.multiplies == 13

    def test_nothing_counted_outside_a_scope(self):
        assert not measuring()
        tally(10)
        with count_mults() as counter:
            assert measuring()
        assert counter.multiplies == 0

    def test_shape_mismatch(self, stream):
        with pytest.raises(ContractViolation):
            matmul(stream.gaussian((3, 4)), stream.gaussian((3, 4)))


class TestSolveSPD:
    def test_solves_and_counts(self, stream):
        M = stream.gaussian((6, 4))
        A = M.T @ M + 0.1 * np.eye(4)
        B = stream.gaussian((4, 2))
        with count_mults() as counter:
            X = solve_spd(A, B)
        np.testing.assert_allclose(A @ X, B, atol=1e-10)
        assert counter.tags["solve"] == spd_solve_mults(4, 2)

    def test_not_spd(self):
        with pytest.raises(NotSPDError, match="not SPD"):
            solve_spd(np.array([[1.0, 2.0], [2.0, 1.0]]), np.ones(2))

    def test_singular(self):
        with pytest.raises(NotSPDError):
            solve_spd(np.ones((3, 3)), np.ones(3))


class TestLifting:
    def test_product_homomorphism(self, stream):
        for _ in range(20):
            A = stream.gaussian((4, 3)) + 1j * stream.gaussian((4, 3))
            B = stream.gaussian((3, 2)) + 1j * stream.gaussian((3, 2))
            x = stream.gaussian(3) + 1j * stream.gaussian(3)
            np.testing.assert_allclose(
                lift_complex(A @ B), lift_complex(A) @ lift_complex(B), atol=1e-12
            )
            np.testing.assert_allclose(
                lift_complex(A @ x), lift_complex(A) @ lift_complex(x), atol=1e-12
            )

    def test_block_structure(self):
        H = np.array([[1 + 2j, 3 - 1j]])
        np.testing.assert_array_equal(
            lift_complex(H), [[1.0, 3.0, -2.0, 1.0], [2.0, -1.0, 1.0, 3.0]]
        )
        np.testing.assert_array_equal(unlift_matrix(lift_complex(H)), H)

    def test_batched(self, stream):
        H = stream.gaussian((5, 3, 2)) + 1j * stream.gaussian((5, 3, 2))
        lifted = lift_complex(H)
        assert lifted.shape == (5, 6, 4)
        np.testing.assert_array_equal(lifted[2], lift_complex(H[2]))


class TestUnits:
    @pytest.mark.parametrize(
        ("value_db", "ratio"), [(0.0, 1.0), (10.0, 10.0), (20.0, 100.0), (-3.0, 0.501187)]
    )
    def test_db_to_linear(self, value_db, ratio):
        assert db_to_linear(value_db) == pytest.approx(ratio, rel=1e-6)
        assert linear_to_db(ratio) == pytest.approx(value_db, abs=1e-5)

    def test_infinities(self):
        assert db_to_linear(math.inf) == math.inf
        assert db_to_linear(-math.inf) == 0.0
        assert linear_to_db(0.0) == -math.inf

    def test_arrays(self):
        np.testing.assert_allclose(db_to_linear(np.array([0.0, 10.0, 30.0])), [1, 10, 1000])
