"""Tests for eigen-decomposition, SLEM extraction and stationary distributions."""

import numpy as np
import pytest
import scipy.linalg

from markov import build_transition_matrix
from models import TimeSeries, TransitionMatrix
from spectral import (
    eigen_decompose,
    limit_distribution_distance,
    matrix_two_norm,
    slem_of_series,
    sort_eigenvalues,
    stationary_distribution,
    stationary_peak,
)
from validation import NumericalError, ValidationError


def _random_stochastic(rng, m):
    p = rng.uniform(size=(m, m))
    return p / p.sum(axis=1, keepdims=True)


def _ts(values):
    return TimeSeries(np.asarray(values, dtype=float), sample_rate_hz=1.0)


class TestEigenDecompose:
    def test_identity(self):
        summary = eigen_decompose(np.eye(2))
        np.testing.assert_allclose(summary.eigenvalues, [1, 1])
        assert summary.slem_modulus == 1.0

    def test_permutation(self):
        summary = eigen_decompose([[0, 1], [1, 0]])
        np.testing.assert_allclose(summary.eigenvalues, [1, -1], atol=1e-12)
        assert summary.slem_modulus == pytest.approx(1.0, abs=1e-12)

    def test_rank_one(self):
        summary = eigen_decompose([[0.5, 0.5], [0.5, 0.5]])
        assert summary.leading_value == pytest.approx(1.0, abs=1e-12)
        assert summary.slem_modulus == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("p", [0.0, 0.1, 0.25, 0.4, 0.5, 0.9])
    def test_symmetric_two_state(self, p):
        summary = eigen_decompose([[1 - p, p], [p, 1 - p]])
        moduli = sorted(np.abs(summary.eigenvalues), reverse=True)
        assert moduli[0] == pytest.approx(1.0, abs=1e-9)
        assert moduli[1] == pytest.approx(abs(1 - 2 * p), abs=1e-9)

    def test_rejects_one_by_one(self):
        with pytest.raises(ValidationError):
            eigen_decompose([[1.0]])

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError):
            eigen_decompose(np.ones((2, 3)))

    def test_residual_bound(self, rng):
        for _ in range(200):
            m = int(rng.integers(2, 31))
            a = _random_stochastic(rng, m)
            norm = np.linalg.norm(a, 2)
            for value in eigen_decompose(a).eigenvalues:
                smallest = scipy.linalg.svdvals(a - value * np.eye(m)).min()
                assert smallest <= 1e-6 * norm

    def test_ordering_and_conjugate_pairs(self, rng):
        for _ in range(50):
            m = int(rng.integers(3, 20))
            summary = eigen_decompose(_random_stochastic(rng, m))
            moduli = summary.moduli
            assert len(summary.eigenvalues) == m
            assert np.all(np.diff(moduli) <= 1e-12)
            assert moduli[0] == pytest.approx(1.0, abs=1e-9)
            values = summary.eigenvalues
            for value in values[np.abs(values.imag) > 1e-9]:
                assert np.min(np.abs(values - np.conj(value))) <= 1e-9

    def test_tie_break_prefers_positive_real(self):
        ordered = sort_eigenvalues([-1.0, 0.5, 1.0])
        np.testing.assert_array_equal(ordered, [1.0, -1.0, 0.5])

    def test_complex_slem_flag(self):
        rotation = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        summary = eigen_decompose(0.5 * rotation + 0.5 / 3)
        assert summary.has_complex_slem()
        assert not eigen_decompose([[0.9, 0.1], [0.1, 0.9]]).has_complex_slem()


class TestSlemOfSeries:
    def test_alternating(self, alternating_ts):
        assert slem_of_series(alternating_ts, 2) == pytest.approx(1.0, abs=1e-12)

    def test_iid_uniform_near_zero(self, rng):
        assert slem_of_series(_ts(rng.uniform(size=50_000)), 5) < 0.1

    def test_logistic_matches_schur(self, logistic_ts):
        tm = build_transition_matrix(logistic_ts, 10)
        t, _ = scipy.linalg.schur(tm.probs, output="complex")
        oracle = np.sort(np.abs(np.diag(t)))[::-1]
        assert slem_of_series(logistic_ts, 10) == pytest.approx(oracle[1], abs=1e-6)

    def test_affine_invariance(self, rng):
        for _ in range(50):
            x = rng.normal(size=int(rng.integers(200, 2000)))
            a = float(rng.uniform(0.1, 10.0))
            b = float(rng.uniform(-100.0, 100.0))
            assert slem_of_series(_ts(a * x + b), 8) == slem_of_series(_ts(x), 8)

    def test_constant_rejected(self):
        with pytest.raises(ValidationError):
            slem_of_series(_ts([2.0] * 20), 4)


class TestStationaryDistribution:
    def test_permutation(self):
        dist = stationary_distribution(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(dist.probs, [0.5, 0.5], atol=1e-12)

    def test_doubly_stochastic_is_uniform(self):
        shift = np.roll(np.eye(4), 1, axis=1)
        p = 0.5 * np.eye(4) + 0.3 * shift + 0.2 * shift @ shift
        dist = stationary_distribution(p)
        np.testing.assert_allclose(dist.probs, 0.25, atol=1e-9)

    def test_hand_solved(self):
        dist = stationary_distribution(np.array([[0.9, 0.1], [0.5, 0.5]]))
        np.testing.assert_allclose(dist.probs, [5 / 6, 1 / 6], atol=1e-9)
        assert dist.residual <= 1e-9
        assert dist.probs.sum() == pytest.approx(1.0, abs=1e-9)

    def test_zero_row_rejected(self):
        tm = TransitionMatrix(probs=[[0.5, 0.5], [0.0, 0.0]], counts=[[2, 2], [0, 0]])
        with pytest.raises(ValidationError, match="unvisited"):
            stationary_distribution(tm)

    def test_reducible_rejected(self):
        with pytest.raises(NumericalError, match="reducible"):
            stationary_distribution(np.eye(3))

    def test_limit_distance(self):
        p = np.array([[0.9, 0.1], [0.5, 0.5]])
        q = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert limit_distribution_distance(p, p) == pytest.approx(0.0, abs=1e-12)
        assert limit_distribution_distance(p, q) == pytest.approx(2 * (5 / 6 - 0.5), abs=1e-9)

    def test_stationary_peak(self):
        assert stationary_peak(np.array([[0.9, 0.1], [0.5, 0.5]])) == pytest.approx(5 / 6, abs=1e-9)
        tm = TransitionMatrix(probs=[[0.5, 0.5], [0.0, 0.0]], counts=[[2, 2], [0, 0]])
        assert np.isnan(stationary_peak(tm))
        assert np.isnan(stationary_peak(np.eye(3)))


class TestMatrixTwoNorm:
    def test_examples(self):
        assert matrix_two_norm(np.zeros((3, 3))) == 0.0
        assert matrix_two_norm(np.eye(3)) == pytest.approx(1.0)
        assert matrix_two_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0)

    def test_zero_iff_equal_and_triangle(self, rng):
        for _ in range(100):
            a, b, c = (_random_stochastic(rng, 6) for _ in range(3))
            assert matrix_two_norm(a - a) == 0.0
            assert matrix_two_norm(a - b) > 0.0
            assert matrix_two_norm(a - c) <= matrix_two_norm(a - b) + matrix_two_norm(b - c) + 1e-9
