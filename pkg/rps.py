"""
Reconstructed phase space detection for slemwatch
Time-delay embedding, full-covariance Gaussian mixtures fit by EM, and the
likelihood-threshold detector used as the comparison method
"""

import logging

import numpy as np
from scipy.cluster.vq import vq
from scipy.special import logsumexp
from scipy.stats import multivariate_normal

from detect import percentile
from models import DetectionResult, Embedding, GmmModel, RpsConfig, SlemSeries, TimeSeries
from validation import (
    NumericalError,
    ValidationError,
    require_finite,
    require_int,
    require_positive,
)

logger = logging.getLogger(__name__)

# eigenvalue floor for component covariances, relative to the data's mean variance
COVARIANCE_FLOOR = 1e-6
KMEANS_ITERATIONS = 10


def embed(ts, d=3, tau=1):
    """Delay vectors [x_k, x_{k+tau}, ..., x_{k+(d-1)tau}] for every admissible k"""
    require_int(d, "d", minimum=1)
    require_int(tau, "tau", minimum=1)
    x = ts.samples if isinstance(ts, TimeSeries) else require_finite(ts, "series")
    span = (d - 1) * tau
    if x.size <= span:
        raise ValidationError(f"series of {x.size} samples is too short for d={d}, tau={tau}")
    count = x.size - span
    index = np.arange(count)[:, None] + np.arange(d)[None, :] * tau
    return Embedding(points=x[index], d=d, tau=tau)


def _points_of(points):
    arr = points.points if isinstance(points, Embedding) else require_finite(points, "points")
    return arr.reshape(len(arr), -1)


def _floor_covariance(cov, floor):
    values, vectors = np.linalg.eigh(cov)
    if np.any(values < floor):
        values = np.maximum(values, floor)
        cov = (vectors * values) @ vectors.T
    return 0.5 * (cov + cov.T)


def _kmeans_init(x, k, rng):
    """k-means++ seeding followed by a few Lloyd iterations"""
    centers = [x[rng.integers(len(x))]]
    for _ in range(1, k):
        dist = np.min(((x[:, None, :] - np.array(centers)[None]) ** 2).sum(axis=2), axis=1)
        total = dist.sum()
        probs = dist / total if total > 0 else np.full(len(x), 1.0 / len(x))
        centers.append(x[rng.choice(len(x), p=probs)])
    centers = np.array(centers)
    for _ in range(KMEANS_ITERATIONS):
        labels, _ = vq(x, centers)
        for j in range(k):
            members = x[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
    labels, _ = vq(x, centers)
    return centers, labels


def _component_log_probs(x, weights, means, covariances):
    return np.column_stack(
        [
            np.log(w) + multivariate_normal.logpdf(x, mean=mu, cov=cov, allow_singular=False)
            for w, mu, cov in zip(weights, means, covariances)
        ]
    )


def fit_gmm(points, n_components=4, seed=0, max_iter=200, tol=1e-6):
    """Fit a full-covariance Gaussian mixture by EM from a seeded k-means start

    Stops after max_iter iterations or when the mean log-likelihood improves
    by less than tol. The per-iteration mean log-likelihood is kept as the trace.
    """
    require_int(n_components, "n_components", minimum=1)
    require_int(max_iter, "max_iter", minimum=1)
    x = _points_of(points)
    n, d = x.shape
    if n < n_components * (d + 1):
        raise ValidationError(
            f"{n} points cannot support {n_components} components in {d} dimensions"
        )
    if n < 10 * n_components * d:
        logger.warning(f"Only {n} points for K={n_components}, d={d}; fit may be unreliable")

    data_cov = np.atleast_2d(np.cov(x, rowvar=False, bias=True))
    spread = np.trace(data_cov) / d
    if spread <= 0:
        raise NumericalError("points are all identical, covariance collapses")
    floor = COVARIANCE_FLOOR * spread

    rng = np.random.default_rng(seed)
    means, labels = _kmeans_init(x, n_components, rng)
    weights = np.empty(n_components)
    covariances = np.empty((n_components, d, d))
    for j in range(n_components):
        members = x[labels == j]
        weights[j] = max(len(members), 1) / n
        if len(members) > d:
            cov = np.atleast_2d(np.cov(members, rowvar=False, bias=True))
        else:
            cov = data_cov
        covariances[j] = _floor_covariance(cov, floor)
    weights /= weights.sum()

    trace = []
    for iteration in range(max_iter):
        log_probs = _component_log_probs(x, weights, means, covariances)
        log_norm = logsumexp(log_probs, axis=1)
        trace.append(float(log_norm.mean()))
        if iteration > 0 and trace[-1] - trace[-2] < tol:
            break

        resp = np.exp(log_probs - log_norm[:, None])
        mass = resp.sum(axis=0)
        if np.any(mass < 1e-10 * n):
            raise NumericalError(
                f"component {int(np.argmin(mass))} lost all its points at iteration {iteration}"
            )
        weights = mass / n
        means = (resp.T @ x) / mass[:, None]
        for j in range(n_components):
            centered = x - means[j]
            cov = (resp[:, j, None] * centered).T @ centered / mass[j]
            covariances[j] = _floor_covariance(cov, floor)

    logger.info(
        f"Fitted GMM K={n_components}, d={d} on {n} points in {len(trace)} iterations, "
        f"mean loglik={trace[-1]:.4f}"
    )
    return GmmModel(
        weights=weights, means=means, covariances=covariances, loglik_trace=tuple(trace)
    )


def score_loglik(model, points):
    """Mean per-point log-density under the mixture"""
    x = _points_of(points)
    if x.shape[1] != model.dim:
        raise ValidationError(f"points have dimension {x.shape[1]}, model has {model.dim}")
    log_probs = _component_log_probs(x, model.weights, model.means, model.covariances)
    return float(logsumexp(log_probs, axis=1).mean())


def rps_detect(ts, baseline_span_s, cfg=None, seed=0):
    """Likelihood-threshold change detection in reconstructed phase space

    The mixture is fit on the baseline embedding. Baseline and post-baseline
    signal are cut into non-overlapping windows of window_s and each window's
    embedding is scored. The threshold is the threshold_percentile of the
    baseline window scores minus margin_sd of their standard deviation; the
    first post-baseline window scoring below it raises the alarm.
    """
    cfg = cfg or RpsConfig()
    if baseline_span_s < 10:
        raise ValidationError(f"baseline span must be at least 10 s, got {baseline_span_s}")
    require_positive(cfg.window_s, "window_s")

    rate = ts.sample_rate_hz
    n_base = int(round(baseline_span_s * rate))
    n_window = int(round(cfg.window_s * rate))
    if n_base >= len(ts):
        raise ValidationError("baseline span covers the whole series, nothing to scan")
    if n_window <= (cfg.d - 1) * cfg.tau:
        raise ValidationError(f"window of {n_window} samples is too short to embed")

    model = fit_gmm(
        embed(ts.samples[:n_base], cfg.d, cfg.tau),
        n_components=cfg.components,
        seed=seed,
        max_iter=cfg.max_iter,
        tol=cfg.tol,
    )

    starts = list(range(0, n_base - n_window + 1, n_window))
    n_baseline_windows = len(starts)
    if n_baseline_windows < 2:
        raise ValidationError("baseline must hold at least two scoring windows")
    starts += list(range(n_base, len(ts) - n_window + 1, n_window))
    if len(starts) == n_baseline_windows:
        raise ValidationError("no complete scoring window after the baseline")

    scores = np.array(
        [score_loglik(model, embed(ts.samples[s : s + n_window], cfg.d, cfg.tau)) for s in starts]
    )
    baseline_scores = scores[:n_baseline_windows]
    threshold = percentile(baseline_scores, cfg.threshold_percentile) - cfg.margin_sd * float(
        np.std(baseline_scores)
    )

    first_alarm = None
    for index in range(n_baseline_windows, len(starts)):
        if scores[index] < threshold:
            first_alarm = index
            break

    start_times = np.array([ts.time_at(s) for s in starts])
    trace = SlemSeries(start_times_s=start_times, values=scores, window_s=n_window / rate)
    alarm_time = float(trace.end_times_s[first_alarm]) if first_alarm is not None else None
    logger.info(f"RPS detector: first alarm window={first_alarm}, threshold={threshold:.4f}")
    return DetectionResult(
        detected=first_alarm is not None,
        first_alarm_index=first_alarm,
        first_alarm_time_s=alarm_time,
        threshold_used=float(threshold),
        mode="rps",
        slem_series=trace,
    )
