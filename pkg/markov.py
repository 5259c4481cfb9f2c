"""
Markov chain utilities for slemwatch
Quantizes series into amplitude states, builds empirical transition matrices,
simulates sample paths and computes structural matrix measures
"""

import logging

import numpy as np

from models import GershgorinBound, Quantizer, TimeSeries, TransitionMatrix
from validation import ValidationError, require_finite, require_int, require_length

logger = logging.getLogger(__name__)


def _samples_of(data):
    if isinstance(data, TimeSeries):
        return data.samples
    return require_finite(data, "series")


def build_quantizer(ts, num_states):
    """Equal-width quantizer over the [min, max] range of the data"""
    require_int(num_states, "num_states", minimum=2)
    samples = _samples_of(ts)
    require_length(samples, "quantizer input", 2)
    lo, hi = float(np.min(samples)), float(np.max(samples))
    if not hi > lo:
        raise ValidationError(
            f"degenerate range: series is constant at {lo}, cannot be quantized"
        )
    return Quantizer(min_value=lo, max_value=hi, num_states=num_states)


def quantize_series(q, samples):
    """State labels 1..m for every sample; out-of-range values clamp"""
    x = np.asarray(samples, dtype=float)
    labels = np.floor((x - q.min_value) / q.bin_width).astype(np.int64) + 1
    return np.clip(labels, 1, q.num_states)


def quantize(q, x):
    """State label 1..m of a single value: floor((x-min)/width)+1, clamped"""
    return int(quantize_series(q, np.array([x]))[0])


def build_transition_matrix(ts, num_states, quantizer=None):
    """Empirical transition matrix from consecutive state pairs

    Rows of unvisited states stay all-zero. A prebuilt quantizer (global
    scope) may be supplied; otherwise one is built from the data itself.
    """
    samples = _samples_of(ts)
    require_length(samples, "transition matrix input", 2)
    q = quantizer if quantizer is not None else build_quantizer(samples, num_states)
    m = q.num_states

    states = quantize_series(q, samples) - 1
    pairs = states[:-1] * m + states[1:]
    counts = np.bincount(pairs, minlength=m * m).reshape(m, m)

    row_sums = counts.sum(axis=1, keepdims=True)
    probs = np.divide(
        counts, row_sums, out=np.zeros((m, m), dtype=float), where=row_sums > 0
    )
    zero_rows = int(np.count_nonzero(row_sums == 0))
    if zero_rows:
        logger.debug(f"Transition matrix has {zero_rows} unvisited state(s) of {m}")
    return TransitionMatrix(probs=probs, counts=counts)


def simulate_path(tm, initial_state, num_steps, seed):
    """Sample a state path by inverse-CDF over each row

    States are labels 1..m; the returned path includes the initial state and
    has num_steps + 1 entries. Entering an unvisited (zero) row is an error.
    """
    m = tm.num_states
    require_int(initial_state, "initial_state", minimum=1)
    require_int(num_steps, "num_steps", minimum=0)
    if initial_state > m:
        raise ValidationError(f"initial_state {initial_state} exceeds {m} states")

    cdf = np.cumsum(tm.probs, axis=1)
    visited = tm.stochastic_rows
    # last state carrying mass in each row absorbs round-off in the CDF tail
    last_positive = np.array(
        [np.flatnonzero(row > 0)[-1] if np.any(row > 0) else -1 for row in tm.probs]
    )

    rng = np.random.default_rng(seed)
    uniforms = rng.random(num_steps)
    path = np.empty(num_steps + 1, dtype=np.int64)
    current = initial_state - 1
    path[0] = initial_state
    if num_steps and not visited[current]:
        raise ValidationError(f"initial state {initial_state} has no outgoing transitions")
    for step, u in enumerate(uniforms, start=1):
        nxt = int(np.searchsorted(cdf[current], u, side="right"))
        current = min(nxt, int(last_positive[current]))
        path[step] = current + 1
        if not visited[current]:
            raise ValidationError(
                f"path entered state {current + 1} at step {step}, which has no "
                "outgoing transitions"
            )
    return path


def density(tm):
    """Fraction of strictly positive transition probabilities"""
    m = tm.num_states
    return float(np.count_nonzero(tm.probs > 0)) / (m * m)


def self_transition_probability(tm):
    """Total diagonal mass (trace) of the transition matrix"""
    return float(np.trace(tm.probs))


def gershgorin(tm):
    """Row-disk centers and radii of the transition matrix"""
    probs = tm.probs if isinstance(tm, TransitionMatrix) else require_finite(tm, "matrix")
    centers = np.diag(probs).copy()
    radii = np.abs(probs).sum(axis=1) - np.abs(centers)
    return GershgorinBound(centers=centers, radii=radii)
