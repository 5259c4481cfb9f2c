"""
SLEM pipeline and change-point detection for slemwatch
Detrend -> window -> chain -> SLEM series, then the percentile-threshold
detector run over the (downsampled) series
"""

import logging
import math

import numpy as np

from markov import build_quantizer, build_transition_matrix
from models import DetectionResult, SlemSeries, TimeSeries
from spectral import eigen_decompose
from timeseries import detrend_moving_average, window_views
from validation import ValidationError, require_finite

logger = logging.getLogger(__name__)

# Threshold percentile of the literal detector, applied to the whole series
PAPER_PERCENTILE = 95.0


def percentile(values, p):
    """Linear-interpolation percentile: rank p/100*(n-1) between sorted neighbours"""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValidationError("percentile of an empty sequence is undefined")
    if not 0 <= p <= 100:
        raise ValidationError(f"percentile must lie in [0, 100], got {p}")
    return float(np.percentile(arr, p))


def slem_series(ts, cfg):
    """Windowed SLEM values of a detrended series

    Window k covers samples [k*stride, k*stride + window). A window whose
    range is degenerate yields NaN (a gap) instead of a value.
    """
    if len(ts) < cfg.window_samples:
        raise ValidationError(
            f"series of {len(ts)} samples is shorter than one window ({cfg.window_samples})"
        )
    detrended = detrend_moving_average(ts, cfg.detrend_window)
    windows = window_views(detrended, cfg.window_samples, cfg.stride_samples)
    if cfg.discard_warmup:
        warmup_s = detrended.time_at(cfg.detrend_window - 1)
        windows = [w for w in windows if w.start_time_s >= warmup_s]
        if not windows:
            raise ValidationError("no window starts after the detrend warm-up")

    quantizer = None
    if cfg.quantizer_scope == "global":
        quantizer = build_quantizer(detrended, cfg.num_states)

    values = np.empty(len(windows))
    for k, window in enumerate(windows):
        try:
            tm = build_transition_matrix(window, cfg.num_states, quantizer=quantizer)
        except ValidationError as e:
            logger.warning(f"Window {k} at {window.start_time_s:.2f} s left as a gap: {e}")
            values[k] = np.nan
            continue
        values[k] = eigen_decompose(tm).slem_modulus

    series = SlemSeries(
        start_times_s=np.array([w.start_time_s for w in windows]),
        values=values,
        window_s=cfg.window_samples / ts.sample_rate_hz,
    )
    logger.info(
        f"Computed {len(series)} SLEM values ({series.gaps} gaps), m={cfg.num_states}, "
        f"window={cfg.window_samples}, stride={cfg.stride_samples}"
    )
    return series


def required_run(cfg, decimated_times, window_s=None):
    """Consecutive below-threshold decimated values that raise an alarm

    next_window in paper mode or without a window length. In corrected mode
    the first and last value of the run must come from windows that are
    next_window - 1 non-overlapping window lengths apart.
    """
    if cfg.mode != "corrected" or window_s is None or len(decimated_times) < 2:
        return cfg.next_window
    step = float(np.median(np.diff(decimated_times)))
    if step <= 0:
        return cfg.next_window
    spacing = max(1, math.ceil(window_s / step - 1e-9))
    return (cfg.next_window - 1) * spacing + 1


def detect_change(slem, cfg, times_s=None):
    """Percentile-threshold change detection over a SLEM series

    The series is decimated by downsample_rate. Scanning starts at index
    baseline_window of the decimated series; an alarm is raised at the first
    index that opens next_window consecutive values strictly below the
    threshold. Gaps (NaN) neither extend nor break a run.

    paper mode: threshold is the 95th percentile of the whole decimated series.
    corrected mode: threshold is the alpha-th percentile of the baseline segment.
    When the series carries its window length (a SlemSeries), corrected mode
    also asks the run to span next_window non-overlapping windows, so one
    low stretch of overlapping windows counts once.
    """
    trace = None
    window_s = None
    if isinstance(slem, SlemSeries):
        trace = slem
        window_s = slem.window_s
        values = np.array(slem.values)
        times = np.array(slem.end_times_s)
    else:
        values = np.asarray(slem, dtype=float).ravel()
        times = np.arange(values.size, dtype=float) if times_s is None else np.asarray(times_s, dtype=float)
        if times.shape != values.shape:
            raise ValidationError("times_s must match the SLEM series in length")
        require_finite(values[~np.isnan(values)], "slem")

    rate = cfg.downsample_rate
    decimated = values[::rate]
    decimated_times = times[::rate]
    if decimated.size <= cfg.baseline_window + cfg.next_window:
        raise ValidationError(
            f"{values.size} SLEM values give {decimated.size} after downsampling by {rate}; "
            f"need more than {cfg.baseline_window + cfg.next_window}"
        )

    if cfg.threshold_override is not None:
        threshold = float(cfg.threshold_override)
    elif cfg.mode == "paper":
        threshold = percentile(decimated[~np.isnan(decimated)], PAPER_PERCENTILE)
    else:
        baseline = decimated[: cfg.baseline_window]
        baseline = baseline[~np.isnan(baseline)]
        if baseline.size == 0:
            raise ValidationError("baseline segment holds only gaps")
        threshold = percentile(baseline, cfg.alpha)

    needed = required_run(cfg, decimated_times, window_s)
    first_alarm = None
    run_length = 0
    run_start = None
    for i in range(cfg.baseline_window, decimated.size):
        value = decimated[i]
        if np.isnan(value):
            continue
        if value < threshold:
            if run_length == 0:
                run_start = i
            run_length += 1
            if run_length == needed:
                first_alarm = run_start
                break
        else:
            run_length = 0

    detected = first_alarm is not None
    alarm_time = float(decimated_times[first_alarm]) if detected else None
    if detected:
        logger.info(
            f"Change detected ({cfg.mode}) at decimated index {first_alarm}, "
            f"t={alarm_time:.2f}, threshold={threshold:.6f}, run={needed}"
        )
    else:
        logger.info(f"No change detected ({cfg.mode}), threshold={threshold:.6f}")
    return DetectionResult(
        detected=detected,
        first_alarm_index=first_alarm,
        first_alarm_time_s=alarm_time,
        threshold_used=threshold,
        mode=cfg.mode,
        slem_series=trace,
    )


def run_pipeline(ts, pipeline_cfg, detector_cfg):
    """slem_series followed by detect_change"""
    if not isinstance(ts, TimeSeries):
        raise ValidationError("run_pipeline expects a TimeSeries")
    return detect_change(slem_series(ts, pipeline_cfg), detector_cfg)
