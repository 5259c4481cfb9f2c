"""Tests for scenarios, the detector comparison and the per-window measures table."""

import math

import numpy as np
import pytest

from experiments import (
    MEASURE_COLUMNS,
    TRACK_COLUMNS,
    baseline_span_s,
    compare_detectors,
    default_scenarios,
    run_scenario,
    scenario_signal,
    summarize_comparison,
    window_measures,
)
from models import BpModelParams, DetectorConfig, PipelineConfig, Scenario, TimeSeries
from validation import ValidationError

SHORT_RUN_S = 340.0
SHORT_ONSET_S = 240.0
RATE_SEEDS = range(20)

MEASURES_CFG = PipelineConfig(window_samples=1000, stride_samples=500, num_states=10, detrend_window=200)


def _row(detector, scenario, detected, alarm, delay, after):
    return {
        "detector": detector,
        "scenario": scenario,
        "seed": 0,
        "detected": detected,
        "alarm_time_s": alarm,
        "time_to_detect_s": delay,
        "after_onset": after,
    }


class TestScenarios:
    def test_defaults(self):
        stationary, hemorrhage = default_scenarios()
        assert stationary.name == "stationary" and stationary.onset_s is None
        assert hemorrhage.name == "hemorrhage"
        assert hemorrhage.onset_s == 360.0
        assert (hemorrhage.hrmean_end, hemorrhage.bp_range_end) == (100.0, 25.0)

    def test_baseline_span(self, small_pipeline, small_detector):
        assert baseline_span_s(small_pipeline, small_detector, 100.0) == pytest.approx(200.0)

    def test_signal_is_seeded(self):
        scenario = Scenario(name="hemorrhage", duration_s=20.0, onset_s=5.0, ramp_s=10.0)
        a, tracks = scenario_signal(scenario, seed=2)
        b, _ = scenario_signal(scenario, seed=2)
        np.testing.assert_array_equal(a.samples, b.samples)
        assert a.sample_rate_hz == 100.0
        assert len(a) == 2000
        assert tracks["heart_rate_bpm"][-1] == pytest.approx(100.0)


class TestSummarizeComparison:
    def test_rates_and_mean_delay(self):
        rows = [
            _row("slem", "hemorrhage", 1, 400.0, 40.0, 1),
            _row("slem", "hemorrhage", 1, 380.0, 20.0, 1),
            _row("slem", "hemorrhage", 0, None, None, 0),
            _row("rps", "stationary", 1, 250.0, 250.0, 0),
            _row("rps", "stationary", 0, None, None, 0),
        ]
        summary = {(s["detector"], s["scenario"]): s for s in summarize_comparison(rows)}
        slem = summary[("slem", "hemorrhage")]
        assert slem["runs"] == 3
        assert slem["detection_rate"] == pytest.approx(2 / 3)
        assert slem["after_onset_rate"] == pytest.approx(2 / 3)
        assert slem["mean_time_to_detect_s"] == pytest.approx(30.0)
        rps = summary[("rps", "stationary")]
        assert rps["detection_rate"] == 0.5
        assert rps["after_onset_rate"] == 0.0

    def test_no_detections(self):
        (summary,) = summarize_comparison([_row("rps", "stationary", 0, None, None, 0)])
        assert summary["mean_time_to_detect_s"] is None


class TestCompareDetectors:
    def test_row_shape(self, small_pipeline, small_detector):
        scenario = Scenario(name="stationary", duration_s=SHORT_RUN_S)
        rows = compare_detectors([scenario], [1], small_pipeline, small_detector)
        assert [r["detector"] for r in rows] == ["slem", "rps"]
        for row in rows:
            assert row["scenario"] == "stationary" and row["seed"] == 1
            assert row["after_onset"] == 0
            if row["detected"]:
                assert row["time_to_detect_s"] == row["alarm_time_s"]
            else:
                assert row["alarm_time_s"] is None and row["time_to_detect_s"] is None

    def test_needs_seeds(self):
        with pytest.raises(ValidationError):
            compare_detectors(default_scenarios(), [])


@pytest.mark.slow
class TestDetectorRates:
    @pytest.fixture(scope="class")
    def summary(self):
        rows = compare_detectors(
            default_scenarios(),
            RATE_SEEDS,
            PipelineConfig(),
            DetectorConfig(mode="corrected"),
            workers=4,
        )
        return {(s["detector"], s["scenario"]): s for s in summarize_comparison(rows)}

    def test_alarms_never_precede_the_baseline_end(self, small_pipeline, small_detector):
        span = baseline_span_s(small_pipeline, small_detector, 100.0)
        scenario = Scenario(name="hemorrhage", duration_s=SHORT_RUN_S, onset_s=SHORT_ONSET_S)
        for seed in range(3):
            results = run_scenario(scenario, seed, small_pipeline, small_detector)
            for result in results.values():
                if result.detected:
                    assert result.first_alarm_time_s > span

    @pytest.mark.parametrize("detector", ["slem", "rps"])
    def test_false_alarm_rate(self, summary, detector):
        stationary = summary[(detector, "stationary")]
        assert stationary["runs"] == len(RATE_SEEDS)
        assert stationary["detection_rate"] <= 0.2

    @pytest.mark.parametrize("detector", ["slem", "rps"])
    def test_hit_rate_after_onset(self, summary, detector):
        assert summary[(detector, "hemorrhage")]["after_onset_rate"] >= 0.8


class TestWindowMeasures:
    def test_columns_and_tracks(self):
        base = BpModelParams(duration_s=60.0, sfecg_hz=100.0, seed=1)
        scenario = Scenario(name="hemorrhage", duration_s=60.0, onset_s=10.0, ramp_s=40.0)
        ts, tracks = scenario_signal(scenario, seed=1, base=base)
        rows, correlations = window_measures(ts, MEASURES_CFG, tracks)
        assert len(rows) == 11
        assert [r["t_s"] for r in rows] == pytest.approx([5.0 * k for k in range(11)])
        for row in rows:
            for column in MEASURE_COLUMNS + TRACK_COLUMNS:
                assert column in row
            assert row["shock_index"] == pytest.approx(row["heart_rate_bpm"] / row["systolic_mmHg"])
        assert set(correlations) == set(MEASURE_COLUMNS[1:]) | set(TRACK_COLUMNS)
        assert rows[-1]["heart_rate_bpm"] > rows[0]["heart_rate_bpm"]

    def test_without_tracks(self, rng):
        ts = TimeSeries(rng.normal(size=6000), 100.0)
        rows, correlations = window_measures(ts, MEASURES_CFG)
        assert "heart_rate_bpm" not in rows[0]
        assert set(correlations) == set(MEASURE_COLUMNS[1:])

    def test_stationary_peak_column(self, rng):
        ts = TimeSeries(rng.normal(size=6000), 100.0)
        rows, correlations = window_measures(ts, MEASURES_CFG)
        peaks = np.array([r["stationary_peak"] for r in rows])
        finite = peaks[~np.isnan(peaks)]
        assert finite.size > 0
        assert np.all((finite >= 0.1 - 1e-9) & (finite <= 1.0))
        assert "stationary_peak" in correlations

    def test_constant_track_gives_nan_correlation(self):
        scenario = Scenario(name="stationary", duration_s=60.0)
        ts, tracks = scenario_signal(scenario, seed=3)
        _, correlations = window_measures(ts, MEASURES_CFG, tracks)
        assert math.isnan(correlations["heart_rate_bpm"])
        assert not math.isnan(correlations["s1"])

    def test_track_length_mismatch(self, rng):
        ts = TimeSeries(rng.normal(size=6000), 100.0)
        tracks = {"heart_rate_bpm": np.full(10, 60.0), "systolic_mmHg": np.full(6000, 120.0)}
        with pytest.raises(ValidationError):
            window_measures(ts, MEASURES_CFG, tracks)

    @pytest.mark.slow
    def test_hemorrhage_correlations(self):
        scenario = Scenario(name="hemorrhage", duration_s=600.0, onset_s=120.0, ramp_s=300.0)
        ts, tracks = scenario_signal(scenario, seed=0)
        _, correlations = window_measures(ts, PipelineConfig(discard_warmup=True), tracks)
        assert correlations["heart_rate_bpm"] < 0
        # structure measures are reported; their sign varies with the realization
        for measure in ("density", "self_transition", "stationary_peak"):
            assert -1.0 <= correlations[measure] <= 1.0
