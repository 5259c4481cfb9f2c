"""
Synthetic signal generation for slemwatch
Noisy logistic-map series, the three-ODE artificial blood-pressure model,
parameter sweeps over that model and the logistic noise experiment
"""

import logging
import math

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from detect import slem_series
from markov import build_transition_matrix
from models import LogisticParams, PipelineConfig, SweepResult, TimeSeries
from spectral import eigen_decompose, limit_distribution_distance, matrix_two_norm
from timeseries import autocorrelation, pearson_correlation
from validation import (
    NumericalError,
    SlemError,
    ValidationError,
    require_choice,
    require_int,
    require_non_negative,
    require_positive,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# RR-process spectral bands (Hz): Mayer waves and respiratory sinus arrhythmia
LF_HZ, HF_HZ = 0.1, 0.25
LF_STD_HZ, HF_STD_HZ = 0.01, 0.01
RR_SAMPLE_RATE_HZ = 1.0

INITIAL_STATE = (1.0, 0.0, 0.04)


# ===== Logistic map =====


def _validate_logistic(p):
    if not 0 < p.x0 < 1:
        raise ValidationError(f"x0 must lie strictly inside (0, 1), got {p.x0}")
    if not 0 < p.mu <= 4:
        raise ValidationError(f"mu must lie in (0, 4], got {p.mu}")
    require_int(p.n, "n", minimum=1)
    require_choice(p.noise_mode, "noise_mode", ("none", "measurement", "dynamic"))
    require_non_negative(p.noise_std, "noise_std")


def logistic_noise(p):
    """The seeded noise draws eps_0..eps_{n-1} used by either noise mode"""
    rng = np.random.default_rng(p.seed)
    return rng.normal(0.0, p.noise_std, size=p.n)


def logistic_orbit(p, dynamic_noise=None):
    """Iterate x_{k+1} = mu x_k (1 - x_k) [+ eps_k, clamped to [0, 1]]"""
    orbit = np.empty(p.n)
    x = p.x0
    for k in range(p.n):
        orbit[k] = x
        x = p.mu * x * (1.0 - x)
        if dynamic_noise is not None:
            x = min(1.0, max(0.0, x + dynamic_noise[k]))
    return orbit


def logistic_series(p):
    """Observed logistic series for the configured noise mode, indexed at 1 Hz"""
    _validate_logistic(p)
    if p.noise_mode == "dynamic":
        observed = logistic_orbit(p, dynamic_noise=logistic_noise(p))
    elif p.noise_mode == "measurement":
        observed = logistic_orbit(p) + logistic_noise(p)
    else:
        observed = logistic_orbit(p)
    logger.info(
        f"Generated logistic series mu={p.mu} n={p.n} noise={p.noise_mode}({p.noise_std})"
    )
    return TimeSeries(observed, sample_rate_hz=1.0)


def noise_experiment(
    seeds,
    mu=3.8,
    n=1000,
    num_states=10,
    x0=0.3,
    measurement_std=0.1,
    dynamic_std=0.02,
    acf_max_lag=10,
):
    """Compare chains of the noise-free, measurement-noise and dynamic-noise series

    Returns (rows, summary): per-seed two-norm distances from the noise-free
    chain, complex-SLEM flags, limit-distribution distances and the largest
    autocorrelation gap to the noise-free series over lags 1..acf_max_lag,
    plus rates and mean gaps.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValidationError("noise experiment needs at least one seed")

    rows = []
    for seed in seeds:
        clean = logistic_series(LogisticParams(mu=mu, x0=x0, n=n, seed=seed))
        measured = logistic_series(
            LogisticParams(mu, x0, n, "measurement", measurement_std, seed)
        )
        dynamic = logistic_series(LogisticParams(mu, x0, n, "dynamic", dynamic_std, seed))

        chains = {
            name: build_transition_matrix(series, num_states)
            for name, series in (("none", clean), ("measurement", measured), ("dynamic", dynamic))
        }
        spectra = {name: eigen_decompose(tm) for name, tm in chains.items()}
        norm_measurement = matrix_two_norm(chains["none"].probs - chains["measurement"].probs)
        norm_dynamic = matrix_two_norm(chains["none"].probs - chains["dynamic"].probs)

        row = {
            "seed": seed,
            "norm_measurement": norm_measurement,
            "norm_dynamic": norm_dynamic,
            "measurement_closer": int(norm_measurement < norm_dynamic),
        }
        for name, summary in spectra.items():
            row[f"slem_{name}"] = summary.slem_modulus
            row[f"complex_slem_{name}"] = int(summary.has_complex_slem())
        for name in ("measurement", "dynamic"):
            try:
                row[f"limit_distance_{name}"] = limit_distribution_distance(
                    chains["none"], chains[name]
                )
            except SlemError as e:
                logger.warning(f"Seed {seed}: no limit distribution for {name}: {e}")
                row[f"limit_distance_{name}"] = float("nan")
        clean_acf = autocorrelation(clean, acf_max_lag)
        for name, series in (("measurement", measured), ("dynamic", dynamic)):
            gap = np.abs(autocorrelation(series, acf_max_lag) - clean_acf)[1:]
            row[f"acf_distance_{name}"] = float(gap.max()) if gap.size else 0.0
        rows.append(row)

    count = len(rows)
    summary = {
        "seeds": count,
        "measurement_closer_rate": sum(r["measurement_closer"] for r in rows) / count,
        "complex_slem_rate_none": sum(r["complex_slem_none"] for r in rows) / count,
        "complex_slem_rate_measurement": sum(r["complex_slem_measurement"] for r in rows) / count,
        "complex_slem_rate_dynamic": sum(r["complex_slem_dynamic"] for r in rows) / count,
    }
    for name in ("measurement", "dynamic"):
        summary[f"mean_acf_distance_{name}"] = float(
            np.mean([r[f"acf_distance_{name}"] for r in rows])
        )
    logger.info(f"Noise experiment over {count} seeds: {summary}")
    return rows, summary


# ===== Artificial blood pressure =====


def _validate_bp(p):
    require_positive(p.sfecg_hz, "sfecg_hz")
    require_positive(p.hrmean_bpm, "hrmean_bpm")
    require_non_negative(p.hrstd_bpm, "hrstd_bpm")
    require_non_negative(p.lfhfratio, "lfhfratio")
    require_positive(p.bp_range_mmHg, "bp_range_mmHg")
    for b in p.b_i:
        require_positive(b, "b_i")
    if len(p.theta_deg) != 5 or len(p.a_i) != 5 or len(p.b_i) != 5:
        raise ValidationError("theta_deg, a_i and b_i need five entries (P, Q, R, S, T)")
    if p.duration_s < 5:
        raise ValidationError(f"duration_s must be at least 5 s, got {p.duration_s}")


def rr_fluctuation(num_samples, lfhfratio, rng):
    """Zero-mean, unit-variance RR fluctuation sampled at 1 Hz

    Spectral synthesis: Gaussian power bumps at the LF and HF bands, weighted
    lfhfratio : 1, given random phases and summed as a bank of sinusoids.
    """
    freqs = np.fft.rfftfreq(num_samples, d=1.0 / RR_SAMPLE_RATE_HZ)
    power = lfhfratio * stats.norm.pdf(freqs, LF_HZ, LF_STD_HZ) + stats.norm.pdf(
        freqs, HF_HZ, HF_STD_HZ
    )
    phases = rng.uniform(0.0, TWO_PI, size=freqs.size)
    phases[0] = 0.0
    if num_samples % 2 == 0:
        phases[-1] = 0.0
    fluctuation = np.fft.irfft(np.sqrt(power) * np.exp(1j * phases), n=num_samples)
    fluctuation -= fluctuation.mean()
    spread = fluctuation.std()
    return fluctuation / spread if spread > 0 else fluctuation


def _beat_schedule(p, duration_s, hr_at, rng):
    """Per-beat start time, angular velocity, extrema angles and widths"""
    num_rr = max(256, 2 ** math.ceil(math.log2(duration_s + 16)))
    fluct = rr_fluctuation(num_rr, p.lfhfratio, rng)
    rr_times = np.arange(num_rr) / RR_SAMPLE_RATE_HZ

    theta_rad = np.radians(p.theta_deg)
    beats = []
    t = 0.0
    while t < duration_s:
        hr = hr_at(t)
        rr_std = 60.0 * p.hrstd_bpm / (hr * hr)
        rr = 60.0 / hr + float(np.interp(t, rr_times, fluct)) * rr_std
        if rr <= 0:
            raise NumericalError(f"non-positive RR interval {rr:.4f} s at t={t:.2f} s")
        # extrema positions and widths stretch with heart rate
        hrfact = math.sqrt(hr / 60.0)
        hrfact2 = math.sqrt(hrfact)
        scale = (hrfact2, hrfact, 1.0, hrfact, hrfact2)
        thetas = tuple(float(th * s) for th, s in zip(theta_rad, scale))
        widths = tuple(b * hrfact for b in p.b_i)
        beats.append((t, TWO_PI / rr, thetas, widths))
        t += rr
    return beats


def bp_derivative(state, omega, thetas, a_i, widths, z0):
    """Right-hand side of the limit-cycle model: unit circle in (x, y), PQRST bumps in z"""
    x, y, z = state
    alpha = 1.0 - math.hypot(x, y)
    theta = math.atan2(y, x)
    dz = -(z - z0)
    for theta_i, a, b in zip(thetas, a_i, widths):
        dtheta = (theta - theta_i + math.pi) % TWO_PI - math.pi
        dz -= a * dtheta * math.exp(-dtheta * dtheta / (2.0 * b * b))
    return (alpha * x - omega * y, alpha * y + omega * x, dz)


def rk4_step(fn, state, h, *args):
    """One classical 4th-order Runge-Kutta step of size h"""
    k1 = fn(state, *args)
    k2 = fn(tuple(s + 0.5 * h * k for s, k in zip(state, k1)), *args)
    k3 = fn(tuple(s + 0.5 * h * k for s, k in zip(state, k2)), *args)
    k4 = fn(tuple(s + h * k for s, k in zip(state, k3)), *args)
    return tuple(
        s + h * (d1 + 2.0 * d2 + 2.0 * d3 + d4) / 6.0
        for s, d1, d2, d3, d4 in zip(state, k1, k2, k3, k4)
    )


def simulate_bp_states(p, hr_at=None):
    """Integrate the model at step 1/sfecg; returns (x, y, z) sample arrays"""
    _validate_bp(p)
    if hr_at is None:
        hr_at = lambda t: p.hrmean_bpm  # noqa: E731
    rng = np.random.default_rng(p.seed)
    beats = _beat_schedule(p, p.duration_s, hr_at, rng)

    n = int(round(p.duration_s * p.sfecg_hz))
    h = 1.0 / p.sfecg_hz
    xs, ys, zs = np.empty(n), np.empty(n), np.empty(n)
    state = INITIAL_STATE
    beat = 0
    for i in range(n):
        t = i * h
        while beat + 1 < len(beats) and beats[beat + 1][0] <= t:
            beat += 1
        xs[i], ys[i], zs[i] = state
        _, omega, thetas, widths = beats[beat]
        state = rk4_step(bp_derivative, state, h, omega, thetas, p.a_i, widths, p.z0)
        if not math.isfinite(state[0] + state[1] + state[2]):
            raise NumericalError(f"integration blew up at t={t + h:.4f} s")
    logger.debug(f"Integrated {n} steps over {len(beats)} beats")
    return xs, ys, zs


def pressure_from_z(z, offset, pulse_range):
    """Map z to pressure via its 1st/99th percentiles, clipped to [offset, offset + range]"""
    z_lo, z_hi = np.percentile(z, [1.0, 99.0])
    if not z_hi > z_lo:
        raise NumericalError("generated waveform is flat, cannot map to pressure")
    normalized = np.clip((z - z_lo) / (z_hi - z_lo), 0.0, 1.0)
    return offset + pulse_range * normalized


def generate_bp(p):
    """Artificial blood-pressure series (mmHg) sampled at sfecg"""
    _, _, z = simulate_bp_states(p)
    bp = pressure_from_z(z, p.bp_offset_mmHg, p.bp_range_mmHg)
    logger.info(
        f"Generated {p.duration_s:g} s of blood pressure at {p.sfecg_hz:g} Hz "
        f"(hrmean={p.hrmean_bpm:g}, hrstd={p.hrstd_bpm:g}, seed={p.seed})"
    )
    return TimeSeries(bp, p.sfecg_hz)


def _ramp(start, end, onset_s, ramp_s):
    def value_at(t):
        if onset_s is None or t <= onset_s:
            return start
        if ramp_s <= 0:
            return end
        return start + (end - start) * min(1.0, (t - onset_s) / ramp_s)

    return value_at


def generate_bp_scenario(base, onset_s, ramp_s, hrmean_end, bp_range_end):
    """Blood pressure with heart rate and pulse pressure ramping from onset_s

    Returns the series and per-sample tracks of the driving heart rate and
    systolic level (offset + pulse pressure). onset_s=None gives a stationary run.
    """
    require_non_negative(ramp_s, "ramp_s")
    require_positive(hrmean_end, "hrmean_end")
    require_positive(bp_range_end, "bp_range_end")
    hr_at = _ramp(base.hrmean_bpm, hrmean_end, onset_s, ramp_s)
    range_at = _ramp(base.bp_range_mmHg, bp_range_end, onset_s, ramp_s)

    _, _, z = simulate_bp_states(base, hr_at=hr_at)
    times = np.arange(z.size) / base.sfecg_hz
    pulse = np.array([range_at(t) for t in times])
    bp = pressure_from_z(z, base.bp_offset_mmHg, pulse)
    tracks = {
        "heart_rate_bpm": np.array([hr_at(t) for t in times]),
        "systolic_mmHg": base.bp_offset_mmHg + pulse,
    }
    logger.info(
        f"Generated scenario {base.duration_s:g} s, onset={onset_s}, "
        f"hr {base.hrmean_bpm:g}->{hrmean_end:g}, range {base.bp_range_mmHg:g}->{bp_range_end:g}"
    )
    return TimeSeries(bp, base.sfecg_hz), tracks


# ===== Parameter sweeps =====


def mean_slem(ts, slem_config):
    """Mean of the windowed SLEM series, gaps ignored"""
    cfg = PipelineConfig(
        window_samples=slem_config.window_samples,
        stride_samples=slem_config.stride_samples,
        num_states=slem_config.num_states,
        detrend_window=min(slem_config.window_samples, len(ts)),
    )
    values = slem_series(ts, cfg).values
    if np.all(np.isnan(values)):
        raise NumericalError("every window was degenerate, no SLEM values")
    return float(np.nanmean(values))


def _mean_slem_for(base, param, value, slem_config):
    return mean_slem(generate_bp(base.with_value(param, value)), slem_config)


def sweep_parameter(base, param, values, slem_config, workers=1):
    """Mean SLEM for each value of one model parameter, with r and slope

    Runs are independent and may execute in parallel; results follow input order.
    """
    require_choice(param, "param", base.SWEEPABLE)
    values = [float(v) for v in values]
    if len(values) < 4:
        raise ValidationError(f"a sweep needs at least 4 values, got {len(values)}")

    means = Parallel(n_jobs=workers)(
        delayed(_mean_slem_for)(base, param, v, slem_config) for v in values
    )
    r = pearson_correlation(values, means)
    slope = float(stats.linregress(values, means).slope)
    logger.info(f"Sweep {param}: r={r:.3f}, slope={slope:.3e} over {len(values)} values")
    return SweepResult(
        parameter=param, values=tuple(values), mean_slem=tuple(means), r=r, slope=slope
    )

