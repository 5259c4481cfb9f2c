"""Tests for quantization, empirical chains, path simulation and matrix measures."""

import numpy as np
import pytest

from markov import (
    build_quantizer,
    build_transition_matrix,
    density,
    gershgorin,
    quantize,
    quantize_series,
    self_transition_probability,
    simulate_path,
)
from models import Quantizer, TimeSeries, TransitionMatrix
from spectral import eigen_decompose
from validation import ValidationError


def _ts(values):
    return TimeSeries(np.asarray(values, dtype=float), sample_rate_hz=1.0)


def _chain(probs):
    """TransitionMatrix whose counts mirror the given probabilities."""
    probs = np.asarray(probs, dtype=float)
    return TransitionMatrix(probs=probs, counts=np.rint(probs * 1000).astype(int))


def _random_stochastic(rng, m, floor=0.0):
    p = rng.uniform(size=(m, m)) + floor
    return p / p.sum(axis=1, keepdims=True)


class TestQuantizer:
    def test_two_level(self):
        q = build_quantizer(_ts([10, 20, 10, 20]), 2)
        assert (q.min_value, q.max_value, q.bin_width) == (10.0, 20.0, 5.0)

    def test_unit_range(self):
        assert build_quantizer(_ts([0, 1]), 4).bin_width == 0.25

    def test_constant_rejected(self):
        with pytest.raises(ValidationError, match="degenerate range"):
            build_quantizer(_ts([3, 3, 3]), 2)

    @pytest.mark.parametrize("x, state", [(10, 1), (14.9, 1), (15, 2), (20, 2), (3, 1), (99, 2)])
    def test_quantize_two_bins(self, x, state):
        assert quantize(Quantizer(10.0, 20.0, 2), x) == state

    def test_max_clamps_into_top_bin(self):
        assert quantize(Quantizer(0.0, 1.0, 4), 1.0) == 4

    def test_labels_in_range(self, rng):
        x = rng.normal(size=1000)
        q = build_quantizer(x, 7)
        labels = quantize_series(q, x)
        assert labels.min() >= 1 and labels.max() <= 7


class TestBuildTransitionMatrix:
    def test_alternation(self):
        tm = build_transition_matrix(_ts([10, 20, 10, 20]), 2)
        np.testing.assert_array_equal(tm.probs, [[0, 1], [1, 0]])

    def test_unvisited_row_stays_zero(self):
        tm = build_transition_matrix(_ts([1, 1, 1, 1, 2]), 2)
        np.testing.assert_allclose(tm.probs, [[0.75, 0.25], [0.0, 0.0]])
        assert tm.zero_rows.tolist() == [1]
        assert tm.stochastic_rows.tolist() == [True, False]
        assert not tm.is_stochastic

    def test_logistic_against_pair_counts(self, logistic_ts):
        m = 10
        tm = build_transition_matrix(logistic_ts, m)
        x = logistic_ts.samples
        lo, hi = x.min(), x.max()
        width = (hi - lo) / m
        states = [min(m, int(np.floor((v - lo) / width)) + 1) for v in x]
        counts = np.zeros((m, m))
        for a, b in zip(states[:-1], states[1:]):
            counts[a - 1, b - 1] += 1
        np.testing.assert_array_equal(tm.counts, counts)
        rows = counts.sum(axis=1, keepdims=True)
        expected = np.divide(counts, rows, out=np.zeros_like(counts), where=rows > 0)
        np.testing.assert_allclose(tm.probs, expected, atol=1e-15)

    def test_rows_sum_to_one_or_zero(self, rng):
        for _ in range(200):
            n = int(rng.integers(100, 10_000))
            m = int(rng.integers(5, 31))
            tm = build_transition_matrix(rng.normal(size=n).cumsum(), m)
            sums = tm.probs.sum(axis=1)
            visited = tm.counts.sum(axis=1) > 0
            np.testing.assert_allclose(sums[visited], 1.0, atol=1e-12)
            assert np.all(tm.probs[~visited] == 0.0)
            assert np.all(tm.probs >= 0.0)

    def test_global_quantizer(self):
        q = Quantizer(0.0, 4.0, 4)
        tm = build_transition_matrix(_ts([0.5, 1.5, 0.5, 1.5]), 4, quantizer=q)
        np.testing.assert_array_equal(tm.probs[:2, :2], [[0, 1], [1, 0]])
        assert tm.zero_rows.tolist() == [2, 3]


class TestSimulatePath:
    def test_identity_absorbs(self):
        path = simulate_path(_chain(np.eye(3)), 1, 10, seed=0)
        assert path.tolist() == [1] * 11

    def test_forced_alternation(self):
        path = simulate_path(_chain([[0, 1], [1, 0]]), 1, 4, seed=0)
        assert path.tolist() == [1, 2, 1, 2, 1]

    def test_seeded_reproducible(self):
        tm = _chain([[0.2, 0.8], [0.6, 0.4]])
        assert simulate_path(tm, 1, 500, seed=9).tolist() == simulate_path(tm, 1, 500, seed=9).tolist()

    def test_pair_frequencies_converge(self):
        probs = np.array([[0.2, 0.5, 0.3], [0.1, 0.6, 0.3], [0.4, 0.4, 0.2]])
        path = simulate_path(_chain(probs), 1, 200_000, seed=1)
        counts = np.zeros((3, 3))
        np.add.at(counts, (path[:-1] - 1, path[1:] - 1), 1)
        estimated = counts / counts.sum(axis=1, keepdims=True)
        assert np.max(np.abs(estimated - probs)) <= 0.01

    def test_round_trip_estimation(self, rng):
        probs = _random_stochastic(rng, 5, floor=1.0)
        assert probs.min() >= 0.05
        path = simulate_path(_chain(probs), 1, 100_000, seed=3)
        rebuilt = build_transition_matrix(path.astype(float), 5)
        assert np.max(np.abs(rebuilt.probs - probs)) <= 0.05

    def test_zero_row_entered(self):
        tm = TransitionMatrix(probs=[[0.0, 1.0], [0.0, 0.0]], counts=[[0, 3], [0, 0]])
        with pytest.raises(ValidationError, match="no outgoing transitions"):
            simulate_path(tm, 1, 5, seed=0)

    def test_zero_row_entered_on_the_last_step(self):
        tm = TransitionMatrix(probs=[[0.0, 1.0], [0.0, 0.0]], counts=[[0, 3], [0, 0]])
        with pytest.raises(ValidationError, match="state 2 at step 1"):
            simulate_path(tm, 1, 1, seed=0)

    def test_starting_in_a_zero_row(self):
        tm = TransitionMatrix(probs=[[0.0, 1.0], [0.0, 0.0]], counts=[[0, 3], [0, 0]])
        assert simulate_path(tm, 2, 0, seed=0).tolist() == [2]
        with pytest.raises(ValidationError, match="no outgoing transitions"):
            simulate_path(tm, 2, 3, seed=0)

    def test_bad_initial_state(self):
        with pytest.raises(ValidationError):
            simulate_path(_chain(np.eye(2)), 3, 5, seed=0)


class TestMeasures:
    def test_density(self):
        assert density(_chain(np.eye(5))) == pytest.approx(0.2)
        assert density(_chain(np.full((3, 3), 1 / 3))) == 1.0
        assert density(_chain([[0, 1], [1, 0]])) == 0.5

    def test_self_transition(self):
        assert self_transition_probability(_chain(np.eye(4))) == 4.0
        assert self_transition_probability(_chain([[0, 1], [1, 0]])) == 0.0
        assert self_transition_probability(_chain([[0.9, 0.1], [0.1, 0.9]])) == pytest.approx(1.8)

    def test_diagonal_shift_keeps_density_raises_trace(self):
        before = _chain([[0.5, 0.5], [0.3, 0.7]])
        after = _chain([[0.8, 0.2], [0.1, 0.9]])
        assert density(before) == density(after)
        assert self_transition_probability(after) > self_transition_probability(before)


class TestGershgorin:
    def test_symmetric_two_state(self):
        bound = gershgorin(_chain([[0.9, 0.1], [0.1, 0.9]]))
        np.testing.assert_allclose(bound.centers, [0.9, 0.9])
        np.testing.assert_allclose(bound.radii, [0.1, 0.1])
        assert bound.lower == pytest.approx(0.8)
        assert bound.upper == pytest.approx(1.0)

    def test_identity(self):
        bound = gershgorin(_chain(np.eye(3)))
        assert (bound.lower, bound.upper) == (1.0, 1.0)

    def test_stochastic_row_center_plus_radius(self, rng):
        bound = gershgorin(_random_stochastic(rng, 6))
        np.testing.assert_allclose(bound.centers + bound.radii, 1.0, atol=1e-12)

    def test_eigenvalues_inside_disks(self, rng):
        for _ in range(50):
            m = int(rng.integers(2, 9))
            probs = _random_stochastic(rng, m)
            bound = gershgorin(probs)
            for value in eigen_decompose(probs).eigenvalues:
                assert bound.contains(value)
                assert abs(value) <= 1 + 1e-9

    def test_built_chains_inside_disks(self, rng):
        for _ in range(100):
            n = int(rng.integers(100, 5000))
            m = int(rng.integers(5, 31))
            tm = build_transition_matrix(rng.uniform(size=n), m)
            bound = gershgorin(tm)
            for value in eigen_decompose(tm).eigenvalues:
                assert bound.contains(value)
                if tm.is_stochastic:
                    assert abs(value) <= 1 + 1e-9
