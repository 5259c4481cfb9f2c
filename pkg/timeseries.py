"""
Time-series utilities for slemwatch
Handles CSV ingestion, moving-average detrending, windowing and the scalar
signal measures (smoothness, correlation, shock index, autocorrelation)
"""

import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import stats

from models import SlemSeries, SmoothnessReport, TimeSeries
from validation import (
    ValidationError,
    require_finite,
    require_int,
    require_length,
    require_positive,
)

logger = logging.getLogger(__name__)


def _parse_cell(cell, row_number, path):
    """Parse one CSV cell as a finite real, naming the file row on failure"""
    try:
        value = float(str(cell).strip())
    except ValueError:
        raise ValidationError(f"{path}: row {row_number} holds {cell!r}, not a number")
    if not math.isfinite(value):
        raise ValidationError(f"{path}: row {row_number} holds non-finite value {cell!r}")
    return value


def _looks_numeric(cell):
    try:
        float(str(cell).strip())
        return True
    except ValueError:
        return False


def _read_frame(path):
    """Every cell of a CSV as a string; unreadable files become ValidationError"""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"input file not found: {path}")
    try:
        frame = pd.read_csv(
            path, header=None, dtype=str, keep_default_na=False, skip_blank_lines=True
        )
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{path} holds no rows")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ValidationError(f"{path} is not a readable CSV: {e}")
    if frame.empty:
        raise ValidationError(f"{path} holds no rows")
    return path, frame


def _select_column(path, frame, column):
    """Data cells of one column plus the file line number of the first one"""
    first_row = [str(c).strip() for c in frame.iloc[0].tolist()]
    if isinstance(column, str) and not column.isdigit():
        if column not in first_row:
            raise ValidationError(f"{path}: no column named {column!r} in header {first_row}")
        col_index = first_row.index(column)
        has_header = True
    else:
        col_index = int(column)
        if col_index < 0 or col_index >= frame.shape[1]:
            raise ValidationError(f"{path}: column index {col_index} out of range")
        has_header = not _looks_numeric(first_row[col_index])

    cells = frame.iloc[:, col_index].tolist()
    offset = 1
    if has_header:
        cells = cells[1:]
        offset = 2
    if not cells:
        raise ValidationError(f"{path} holds a header but no data rows")
    return cells, offset


def load_csv(path, column=0, sample_rate_hz=100.0):
    """Load one column of a CSV file as a TimeSeries

    `column` is a header name or a 0-based column index. A header row is
    required when selecting by name and detected automatically otherwise.
    Row numbers in error messages are 1-based file lines.
    """
    require_positive(sample_rate_hz, "sample_rate_hz")
    path, frame = _read_frame(path)
    cells, offset = _select_column(path, frame, 0 if column is None else column)

    samples = [_parse_cell(cell, i + offset, path) for i, cell in enumerate(cells)]
    logger.info(f"Loaded {len(samples)} samples from {path} at {sample_rate_hz} Hz")
    return TimeSeries(np.array(samples), sample_rate_hz)


def load_slem_series(path, column=None, window_s=0.0):
    """Load a SLEM series CSV; empty cells are gaps (NaN)

    `column` defaults to the `slem` header when present, else column 0.
    Window start times come from a `t_s` column; without one the row index
    stands in for time and the window length is taken as zero.
    """
    path, frame = _read_frame(path)
    first_row = [str(c).strip() for c in frame.iloc[0].tolist()]
    if column is None:
        column = "slem" if "slem" in first_row else 0
    cells, offset = _select_column(path, frame, column)

    values = np.array(
        [np.nan if not str(cell).strip() else _parse_cell(cell, i + offset, path)
         for i, cell in enumerate(cells)]
    )
    if np.all(np.isnan(values)):
        raise ValidationError(f"{path}: the SLEM column holds only gaps")

    if "t_s" in first_row:
        t_cells, t_offset = _select_column(path, frame, "t_s")
        start_times = np.array([_parse_cell(c, i + t_offset, path) for i, c in enumerate(t_cells)])
    else:
        start_times = np.arange(values.size, dtype=float)
        window_s = 0.0
    series = SlemSeries(start_times_s=start_times, values=values, window_s=float(window_s))
    logger.info(f"Loaded {len(series)} SLEM values ({series.gaps} gaps) from {path}")
    return series


def detrend_moving_average(ts, window_samples):
    """Subtract the trailing (causal) moving average of `window_samples` samples

    Output k is x[k] - mean(x[max(0, k-w+1) .. k]); length is preserved.
    """
    require_int(window_samples, "window_samples", minimum=1)
    if window_samples > len(ts):
        raise ValidationError(
            f"detrend window {window_samples} exceeds series length {len(ts)}"
        )
    x = ts.samples
    csum = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(len(x))
    lo = np.maximum(0, idx - window_samples + 1)
    trailing_mean = (csum[idx + 1] - csum[lo]) / (idx + 1 - lo)
    return ts.with_samples(x - trailing_mean)


def window_views(ts, window_samples, stride_samples):
    """Consecutive windows [k*stride, k*stride + window) as TimeSeries"""
    require_int(window_samples, "window_samples", minimum=1)
    require_int(stride_samples, "stride_samples", minimum=1)
    if window_samples > len(ts):
        raise ValidationError(
            f"series of {len(ts)} samples is shorter than one window ({window_samples})"
        )
    count = (len(ts) - window_samples) // stride_samples + 1
    return [
        TimeSeries(
            ts.samples[k * stride_samples : k * stride_samples + window_samples],
            ts.sample_rate_hz,
            ts.time_at(k * stride_samples),
        )
        for k in range(count)
    ]


def smoothness(ts):
    """S1, S2 (sums) and V1, V2 (population variances) of successive differences"""
    require_length(ts.samples, "smoothness input", 3)
    d1 = np.diff(ts.samples, n=1)
    d2 = np.diff(ts.samples, n=2)
    return SmoothnessReport(
        s1=float(d1.sum()),
        s2=float(d2.sum()),
        v1=float(np.var(d1)),
        v2=float(np.var(d2)),
    )


def pearson_correlation(a, b):
    """Pearson product-moment correlation of two equal-length sequences"""
    a = require_finite(a, "a")
    b = require_finite(b, "b")
    if a.shape != b.shape:
        raise ValidationError(f"sequences differ in length: {a.size} vs {b.size}")
    require_length(a, "correlation input", 2)
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise ValidationError("correlation is undefined for a constant sequence")
    r = stats.pearsonr(a, b)[0]
    return float(np.clip(r, -1.0, 1.0))


def shock_index(heart_rate_bpm, systolic_bp_mmHg):
    """Elementwise heart rate / systolic blood pressure"""
    hr = require_finite(heart_rate_bpm, "heart_rate_bpm")
    sbp = require_finite(systolic_bp_mmHg, "systolic_bp_mmHg")
    if hr.shape != sbp.shape:
        raise ValidationError(f"sequences differ in length: {hr.size} vs {sbp.size}")
    if np.any(sbp <= 0):
        bad = int(np.flatnonzero(sbp <= 0)[0])
        raise ValidationError(f"systolic pressure must be positive, got {sbp[bad]} at {bad}")
    return hr / sbp


def autocorrelation(ts, max_lag):
    """Normalized ACF for lags 0..max_lag (biased autocovariance over variance)"""
    require_int(max_lag, "max_lag", minimum=0)
    n = len(ts)
    if max_lag >= n:
        raise ValidationError(f"max_lag {max_lag} must be below series length {n}")
    x = ts.samples - ts.samples.mean()
    variance = float(np.dot(x, x)) / n
    if variance == 0:
        raise ValidationError("autocorrelation is undefined for a constant series")
    acf = np.array([np.dot(x[: n - k], x[k:]) / n for k in range(max_lag + 1)]) / variance
    return np.clip(acf, -1.0, 1.0)
