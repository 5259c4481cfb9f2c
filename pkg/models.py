"""
Domain models for slemwatch
Immutable value types shared by the time-series, chain, spectral, synthesis,
detection and phase-space modules
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from validation import ValidationError, require_choice, require_int

logger = logging.getLogger(__name__)


def _frozen_array(values, dtype=float):
    """Copy into a read-only numpy array"""
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


# ===== Time series =====


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled scalar signal"""

    samples: np.ndarray
    sample_rate_hz: float
    start_time_s: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float).ravel()
        if samples.size < 1:
            raise ValidationError("a time series needs at least one sample")
        rate = float(self.sample_rate_hz)
        if not math.isfinite(rate) or rate <= 0:
            raise ValidationError(f"sample_rate_hz must be positive, got {self.sample_rate_hz!r}")
        object.__setattr__(self, "samples", _frozen_array(samples))
        object.__setattr__(self, "sample_rate_hz", rate)
        object.__setattr__(self, "start_time_s", float(self.start_time_s))

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self):
        return len(self) / self.sample_rate_hz

    def time_at(self, k):
        """Time in seconds of sample k"""
        return self.start_time_s + k / self.sample_rate_hz

    def times(self):
        return self.start_time_s + np.arange(len(self)) / self.sample_rate_hz

    def with_samples(self, samples):
        """Same timing, new amplitudes"""
        return TimeSeries(samples, self.sample_rate_hz, self.start_time_s)


@dataclass(frozen=True)
class SmoothnessReport:
    """Sums and population variances of 1st and 2nd successive differences"""

    s1: float
    s2: float
    v1: float
    v2: float


# ===== Markov chains =====


@dataclass(frozen=True)
class Quantizer:
    """Equal-width amplitude binning into states 1..m"""

    min_value: float
    max_value: float
    num_states: int

    @property
    def bin_width(self):
        return (self.max_value - self.min_value) / self.num_states


@dataclass(frozen=True)
class TransitionMatrix:
    """Empirical first-order chain: raw transition counts and row-normalized probabilities"""

    probs: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _frozen_array(self.probs))
        object.__setattr__(self, "counts", _frozen_array(self.counts, dtype=np.int64))

    @property
    def num_states(self):
        return self.probs.shape[0]

    @property
    def zero_rows(self):
        """Indices (0-based) of unvisited states"""
        return np.flatnonzero(self.counts.sum(axis=1) == 0)

    @property
    def stochastic_rows(self):
        """Boolean mask of rows that sum to one (visited states)"""
        return self.counts.sum(axis=1) > 0

    @property
    def is_stochastic(self):
        return self.zero_rows.size == 0


@dataclass(frozen=True)
class GershgorinBound:
    """Row disks of a matrix and the real interval they span"""

    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "centers", _frozen_array(self.centers))
        object.__setattr__(self, "radii", _frozen_array(self.radii))

    @property
    def lower(self):
        return float(np.min(self.centers - self.radii))

    @property
    def upper(self):
        return float(np.max(self.centers + self.radii))

    def contains(self, value, tol=1e-9):
        """True when `value` lies in the union of the disks"""
        return bool(np.any(np.abs(value - self.centers) <= self.radii + tol))


# ===== Spectra =====


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalues sorted by descending modulus; SLEM is the 2nd entry"""

    eigenvalues: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen_array(self.eigenvalues, dtype=complex))

    @property
    def moduli(self):
        return np.abs(self.eigenvalues)

    @property
    def leading_value(self):
        return complex(self.eigenvalues[0])

    @property
    def slem_value(self):
        return complex(self.eigenvalues[1])

    @property
    def slem_modulus(self):
        return float(abs(self.eigenvalues[1]))

    def has_complex_slem(self, tol=1e-9):
        return abs(self.slem_value.imag) > tol

    def to_rows(self):
        """(re, im, modulus) per eigenvalue"""
        return [(float(v.real), float(v.imag), float(abs(v))) for v in self.eigenvalues]


@dataclass(frozen=True)
class StationaryDistribution:
    """Limit distribution of a chain and its residual ||pi P - pi||_inf"""

    probs: np.ndarray
    residual: float

    def __post_init__(self):
        object.__setattr__(self, "probs", _frozen_array(self.probs))


# ===== Synthetic signals =====


@dataclass(frozen=True)
class LogisticParams:
    """Logistic map x_{n+1} = mu x_n (1 - x_n) with optional noise"""

    mu: float = 3.8
    x0: float = 0.3
    n: int = 1000
    noise_mode: str = "none"  # none | measurement | dynamic
    noise_std: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class BpModelParams:
    """Parameters of the three-ODE artificial blood-pressure generator"""

    sfecg_hz: float = 256.0
    hrmean_bpm: float = 60.0
    hrstd_bpm: float = 1.0
    lfhfratio: float = 0.5
    theta_deg: tuple = (-70.0, -15.0, 0.0, 15.0, 100.0)
    a_i: tuple = (1.2, -5.0, 30.0, -7.5, 0.75)
    b_i: tuple = (0.25, 0.1, 0.1, 0.1, 0.4)
    z0: float = 0.0
    bp_offset_mmHg: float = 80.0
    bp_range_mmHg: float = 40.0
    duration_s: float = 60.0
    seed: int = 0

    # parameter names accepted by sweeps
    SWEEPABLE = (
        "sfecg_hz",
        "hrmean_bpm",
        "hrstd_bpm",
        "lfhfratio",
        "theta_s_deg",
        "bp_offset_mmHg",
        "bp_range_mmHg",
    )

    def with_value(self, param, value):
        """Copy with one sweepable parameter replaced"""
        if param == "theta_s_deg":
            theta = list(self.theta_deg)
            theta[3] = float(value)
            return replace(self, theta_deg=tuple(theta))
        return replace(self, **{param: float(value)})

    def value_of(self, param):
        if param == "theta_s_deg":
            return self.theta_deg[3]
        return getattr(self, param)

    def as_dict(self):
        return {
            "sfecg_hz": self.sfecg_hz,
            "hrmean_bpm": self.hrmean_bpm,
            "hrstd_bpm": self.hrstd_bpm,
            "lfhfratio": self.lfhfratio,
            "theta_deg": " ".join(f"{v:g}" for v in self.theta_deg),
            "a_i": " ".join(f"{v:g}" for v in self.a_i),
            "b_i": " ".join(f"{v:g}" for v in self.b_i),
            "z0": self.z0,
            "bp_offset_mmHg": self.bp_offset_mmHg,
            "bp_range_mmHg": self.bp_range_mmHg,
            "duration_s": self.duration_s,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SlemConfig:
    """Chain settings used when a sweep reduces a signal to its mean SLEM"""

    num_states: int = 10
    window_samples: int = 2000
    stride_samples: int = 100


@dataclass(frozen=True)
class SweepResult:
    """Mean SLEM per swept parameter value, with correlation and slope"""

    parameter: str
    values: tuple
    mean_slem: tuple
    r: float
    slope: float

    def to_rows(self):
        return list(zip(self.values, self.mean_slem))


@dataclass(frozen=True)
class Scenario:
    """Synthetic monitoring run: stationary when onset_s is None"""

    name: str
    duration_s: float
    onset_s: Optional[float] = None
    ramp_s: float = 60.0
    hrmean_end: float = 100.0
    bp_range_end: float = 25.0


# ===== Detection =====


@dataclass(frozen=True)
class PipelineConfig:
    """Detrend -> window -> chain -> SLEM settings"""

    window_samples: int = 2000
    stride_samples: int = 100
    num_states: int = 10
    detrend_window: int = 2000
    quantizer_scope: str = "per-window"  # per-window | global
    discard_warmup: bool = False

    def __post_init__(self):
        require_int(self.num_states, "num_states", minimum=2)
        require_int(self.window_samples, "window_samples", minimum=self.num_states)
        require_int(self.stride_samples, "stride_samples", minimum=1)
        require_int(self.detrend_window, "detrend_window", minimum=1)
        require_choice(self.quantizer_scope, "quantizer_scope", ("per-window", "global"))


@dataclass(frozen=True)
class DetectorConfig:
    """Change-point detector parameters over a SLEM series"""

    baseline_window: int = 75
    downsample_rate: int = 4
    alpha: float = 5.0
    next_window: int = 4
    mode: str = "paper"  # paper | corrected
    threshold_override: Optional[float] = None

    def __post_init__(self):
        require_int(self.downsample_rate, "downsample_rate", minimum=1)
        require_int(self.next_window, "next_window", minimum=1)
        require_int(self.baseline_window, "baseline_window", minimum=1)
        require_choice(self.mode, "mode", ("paper", "corrected"))
        if self.baseline_window <= self.next_window:
            raise ValidationError("baseline_window must exceed next_window")
        if not 0 < self.alpha < 100:
            raise ValidationError(f"alpha must lie in (0, 100), got {self.alpha}")


@dataclass(frozen=True)
class RpsConfig:
    """Reconstructed phase space + GMM detector parameters"""

    d: int = 3
    tau: int = 1
    components: int = 4
    threshold_percentile: float = 1.0
    window_s: float = 5.0
    margin_sd: float = 0.0
    max_iter: int = 200
    tol: float = 1e-6


@dataclass(frozen=True)
class SlemSeries:
    """Windowed SLEM values; NaN marks a window that could not be quantized"""

    start_times_s: np.ndarray
    values: np.ndarray
    window_s: float

    def __post_init__(self):
        object.__setattr__(self, "start_times_s", _frozen_array(self.start_times_s))
        object.__setattr__(self, "values", _frozen_array(self.values))

    def __len__(self):
        return self.values.size

    @property
    def end_times_s(self):
        return self.start_times_s + self.window_s

    @property
    def gaps(self):
        return int(np.count_nonzero(np.isnan(self.values)))


@dataclass(frozen=True)
class DetectionResult:
    """Alarm outcome shared by the SLEM and phase-space detectors

    `slem_series` holds the monitored statistic: windowed SLEM values for the
    chain detector, per-window mean log-likelihoods for the phase-space one.
    """

    detected: bool
    first_alarm_index: Optional[int]
    first_alarm_time_s: Optional[float]
    threshold_used: float
    mode: str
    slem_series: Optional[SlemSeries] = None

    def __post_init__(self):
        if self.detected != (self.first_alarm_index is not None):
            raise ValueError("first_alarm_index must be present exactly when detected")

    def to_row(self):
        return {
            "detected": int(self.detected),
            "first_alarm_index": "" if self.first_alarm_index is None else self.first_alarm_index,
            "first_alarm_time_s": "" if self.first_alarm_time_s is None else self.first_alarm_time_s,
            "threshold": self.threshold_used,
            "mode": self.mode,
        }


# ===== Phase space =====


@dataclass(frozen=True)
class Embedding:
    """Time-delay vectors: row k, column j holds sample k + j*tau"""

    points: np.ndarray
    d: int
    tau: int

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen_array(self.points))

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class GmmModel:
    """Full-covariance Gaussian mixture with its EM log-likelihood trace"""

    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    loglik_trace: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen_array(self.weights))
        object.__setattr__(self, "means", _frozen_array(self.means))
        object.__setattr__(self, "covariances", _frozen_array(self.covariances))

    @property
    def n_components(self):
        return self.weights.size

    @property
    def dim(self):
        return self.means.shape[1]


# ===== Runs =====


@dataclass(frozen=True)
class RunManifest:
    """How an output directory was produced"""

    command: str
    params: dict
    seed: Optional[int]
    inputs: tuple
    outputs: tuple
    version: str

    def lines(self):
        rows = [f"command={self.command}", f"version={self.version}"]
        rows.append(f"seed={'' if self.seed is None else self.seed}")
        rows.append(f"inputs={','.join(str(p) for p in self.inputs)}")
        rows.append(f"outputs={','.join(str(p) for p in self.outputs)}")
        for key in sorted(self.params):
            rows.append(f"{key}={self.params[key]}")
        return rows
