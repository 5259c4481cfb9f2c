"""Shared fixtures for the slemwatch test suite."""

import numpy as np
import pytest

from models import DetectorConfig, LogisticParams, PipelineConfig, TimeSeries
from synth import logistic_series


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def write_csv(tmp_path):
    """Write lines to a CSV under tmp_path and return its path."""

    def _write(lines, name="input.csv"):
        path = tmp_path / name
        path.write_text("\n".join(str(line) for line in lines) + "\n")
        return path

    return _write


@pytest.fixture
def logistic_ts():
    return logistic_series(LogisticParams(mu=3.8, x0=0.3, n=1000))


@pytest.fixture
def alternating_ts():
    return TimeSeries(np.tile([10.0, 20.0], 50), sample_rate_hz=1.0)


@pytest.fixture
def step_down_slem(rng):
    """SLEM-like series: 400 values near 0.9 then 200 near 0.5."""
    high = 0.9 + rng.uniform(-0.005, 0.005, 400)
    low = 0.5 + rng.uniform(-0.005, 0.005, 200)
    return np.concatenate([high, low])


@pytest.fixture
def small_pipeline():
    """Pipeline sized for short synthetic runs at 100 Hz."""
    return PipelineConfig(
        window_samples=2000,
        stride_samples=100,
        num_states=10,
        detrend_window=2000,
        discard_warmup=True,
    )


@pytest.fixture
def small_detector():
    return DetectorConfig(
        baseline_window=50, downsample_rate=4, alpha=5.0, next_window=4, mode="corrected"
    )
