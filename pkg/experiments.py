"""
Experiment utilities for slemwatch
Synthetic monitoring scenarios, the SLEM vs phase-space detector comparison
and the per-window measures table
"""

import logging
from dataclasses import replace

import numpy as np
from joblib import Parallel, delayed

from config import SCENARIO_RPS_MARGIN_SD
from detect import detect_change, slem_series
from markov import build_quantizer, build_transition_matrix, density, self_transition_probability
from models import BpModelParams, DetectorConfig, PipelineConfig, RpsConfig, Scenario
from rps import rps_detect
from spectral import eigen_decompose, stationary_peak
from synth import generate_bp_scenario
from timeseries import (
    detrend_moving_average,
    pearson_correlation,
    shock_index,
    smoothness,
    window_views,
)
from validation import SlemError, ValidationError, require_length

logger = logging.getLogger(__name__)

# scenarios are sampled at the rate the default pipeline windows assume
SCENARIO_SAMPLE_RATE_HZ = 100.0

MEASURE_COLUMNS = (
    "slem", "s1", "s2", "v1", "v2", "density", "self_transition", "stationary_peak"
)
TRACK_COLUMNS = ("heart_rate_bpm", "systolic_mmHg", "shock_index")


def default_scenarios(duration_s=600.0, onset_s=360.0, ramp_s=60.0):
    """A stationary run and a hemorrhage run (hr 60 -> 100, pulse 40 -> 25 mmHg)"""
    return [
        Scenario(name="stationary", duration_s=duration_s, onset_s=None, ramp_s=ramp_s),
        Scenario(
            name="hemorrhage",
            duration_s=duration_s,
            onset_s=onset_s,
            ramp_s=ramp_s,
            hrmean_end=100.0,
            bp_range_end=25.0,
        ),
    ]


def baseline_span_s(pipeline_cfg, detector_cfg, sample_rate_hz):
    """Seconds of signal covered by the SLEM detector's baseline segment"""
    step_s = pipeline_cfg.stride_samples * detector_cfg.downsample_rate / sample_rate_hz
    return detector_cfg.baseline_window * step_s


def scenario_signal(scenario, seed, base=None):
    """Generate one scenario's blood pressure and its driving tracks"""
    base = base or BpModelParams(sfecg_hz=SCENARIO_SAMPLE_RATE_HZ)
    params = replace(base, duration_s=scenario.duration_s, seed=seed)
    return generate_bp_scenario(
        params, scenario.onset_s, scenario.ramp_s, scenario.hrmean_end, scenario.bp_range_end
    )


def run_scenario(scenario, seed, pipeline_cfg=None, detector_cfg=None, rps_cfg=None, base=None):
    """Run both detectors on one seeded scenario; returns {"slem": ..., "rps": ...}"""
    pipeline_cfg = pipeline_cfg or PipelineConfig()
    detector_cfg = detector_cfg or DetectorConfig()
    rps_cfg = rps_cfg or RpsConfig(margin_sd=SCENARIO_RPS_MARGIN_SD)

    ts, _ = scenario_signal(scenario, seed, base)
    span = baseline_span_s(pipeline_cfg, detector_cfg, ts.sample_rate_hz)
    results = {
        "slem": detect_change(slem_series(ts, pipeline_cfg), detector_cfg),
        "rps": rps_detect(ts, span, rps_cfg, seed=seed),
    }
    logger.info(
        f"Scenario {scenario.name} seed={seed}: "
        + ", ".join(f"{name} detected={r.detected}" for name, r in results.items())
    )
    return results


def _comparison_rows(scenario, seed, pipeline_cfg, detector_cfg, rps_cfg, base):
    results = run_scenario(scenario, seed, pipeline_cfg, detector_cfg, rps_cfg, base)
    rows = []
    for detector, result in results.items():
        alarm = result.first_alarm_time_s
        if alarm is None:
            delay = None
        elif scenario.onset_s is None:
            delay = alarm
        else:
            delay = alarm - scenario.onset_s
        rows.append(
            {
                "detector": detector,
                "scenario": scenario.name,
                "seed": seed,
                "detected": int(result.detected),
                "alarm_time_s": alarm,
                "time_to_detect_s": delay,
                "after_onset": int(
                    alarm is not None and scenario.onset_s is not None and alarm > scenario.onset_s
                ),
            }
        )
    return rows


def compare_detectors(
    scenarios, seeds, pipeline_cfg=None, detector_cfg=None, rps_cfg=None, base=None, workers=1
):
    """Detection outcome of both detectors for every (scenario, seed) pair

    Pairs may run in parallel; rows come back in scenario-then-seed order.
    time_to_detect_s is measured from onset, or from t=0 for stationary runs.
    """
    scenarios = list(scenarios)
    seeds = list(seeds)
    if not scenarios or not seeds:
        raise ValidationError("comparison needs at least one scenario and one seed")
    batches = Parallel(n_jobs=workers)(
        delayed(_comparison_rows)(scenario, seed, pipeline_cfg, detector_cfg, rps_cfg, base)
        for scenario in scenarios
        for seed in seeds
    )
    rows = [row for batch in batches for row in batch]
    logger.info(f"Compared detectors on {len(scenarios)} scenarios x {len(seeds)} seeds")
    return rows


def summarize_comparison(rows):
    """Detection rate and after-onset rate per (detector, scenario)"""
    groups = {}
    for row in rows:
        groups.setdefault((row["detector"], row["scenario"]), []).append(row)
    summary = []
    for (detector, scenario), group in groups.items():
        delays = [r["time_to_detect_s"] for r in group if r["time_to_detect_s"] is not None]
        summary.append(
            {
                "detector": detector,
                "scenario": scenario,
                "runs": len(group),
                "detection_rate": sum(r["detected"] for r in group) / len(group),
                "after_onset_rate": sum(r["after_onset"] for r in group) / len(group),
                "mean_time_to_detect_s": float(np.mean(delays)) if delays else None,
            }
        )
    return summary


def _window_starts(n, cfg):
    starts = list(range(0, n - cfg.window_samples + 1, cfg.stride_samples))
    if cfg.discard_warmup:
        starts = [s for s in starts if s >= cfg.detrend_window - 1]
    return starts


def window_measures(ts, cfg, tracks=None):
    """Per-window SLEM alongside the smoothness and matrix structure measures

    Windows follow slem_series exactly. With tracks (per-sample heart_rate_bpm
    and systolic_mmHg), each window also carries their means and shock index.
    Returns (rows, correlations) where correlations pairs SLEM with every
    other column; undefined correlations come back as NaN. stationary_peak is
    the largest limit probability, NaN when the window chain has no unique one.
    """
    if tracks is not None:
        for key in ("heart_rate_bpm", "systolic_mmHg"):
            if key not in tracks or len(tracks[key]) != len(ts):
                raise ValidationError(f"track {key} must hold one value per sample")

    detrended = detrend_moving_average(ts, cfg.detrend_window)
    windows = window_views(detrended, cfg.window_samples, cfg.stride_samples)
    starts = list(range(0, len(ts) - cfg.window_samples + 1, cfg.stride_samples))
    kept = set(_window_starts(len(ts), cfg))
    pairs = [(s, w) for s, w in zip(starts, windows) if s in kept]
    if not pairs:
        raise ValidationError("no window starts after the detrend warm-up")

    quantizer = build_quantizer(detrended, cfg.num_states) if cfg.quantizer_scope == "global" else None

    rows = []
    for start, window in pairs:
        report = smoothness(window)
        row = {
            "t_s": window.start_time_s,
            "s1": report.s1,
            "s2": report.s2,
            "v1": report.v1,
            "v2": report.v2,
        }
        try:
            tm = build_transition_matrix(window, cfg.num_states, quantizer=quantizer)
            row["slem"] = eigen_decompose(tm).slem_modulus
            row["density"] = density(tm)
            row["self_transition"] = self_transition_probability(tm)
            row["stationary_peak"] = stationary_peak(tm)
        except ValidationError as e:
            logger.warning(f"Window at {window.start_time_s:.2f} s left as a gap: {e}")
            for column in ("slem", "density", "self_transition", "stationary_peak"):
                row[column] = float("nan")
        if tracks is not None:
            span = slice(start, start + cfg.window_samples)
            hr = float(np.mean(tracks["heart_rate_bpm"][span]))
            sbp = float(np.mean(tracks["systolic_mmHg"][span]))
            row["heart_rate_bpm"] = hr
            row["systolic_mmHg"] = sbp
            row["shock_index"] = float(shock_index([hr], [sbp])[0])
        rows.append(row)

    columns = [c for c in MEASURE_COLUMNS if c != "slem"]
    if tracks is not None:
        columns += list(TRACK_COLUMNS)
    correlations = _slem_correlations(rows, columns)
    logger.info(f"Computed measures for {len(rows)} windows")
    return rows, correlations


def _slem_correlations(rows, columns):
    correlations = {}
    for column in columns:
        valid = [r for r in rows if not (np.isnan(r["slem"]) or np.isnan(r[column]))]
        try:
            require_length(valid, "correlation input", 2)
            correlations[column] = pearson_correlation(
                [r["slem"] for r in valid], [r[column] for r in valid]
            )
        except SlemError as e:
            logger.warning(f"Correlation of SLEM with {column} undefined: {e}")
            correlations[column] = float("nan")
    return correlations
