"""
Detection commands for the slemwatch CLI
SLEM series, the percentile-threshold detector and the phase-space detector
"""

import logging

import click
import numpy as np

from config import (
    get_detector_config,
    get_pipeline_config,
    get_rps_config,
    get_scenario_rps_config,
)
from detect import detect_change, slem_series
from handlers import (
    PAPER_MODE_CAVEAT,
    command_guard,
    finish_run,
    output_option,
    prepare_output_dir,
    series_input_options,
)
from models import DetectorConfig, PipelineConfig, RpsConfig
from rps import rps_detect
from timeseries import load_csv, load_slem_series
from utils.output_utils import write_columns, write_table

logger = logging.getLogger(__name__)

DETECTION_COLUMNS = ("detected", "first_alarm_index", "first_alarm_time_s", "threshold", "mode")


def pipeline_options(f):
    """Decorator adding one flag per PipelineConfig field"""
    options = [
        click.option("--window", "window_samples", type=int,
                     default=lambda: get_pipeline_config().window_samples,
                     show_default="SLEM_WINDOW_SAMPLES", help="Window length in samples"),
        click.option("--stride", "stride_samples", type=int,
                     default=lambda: get_pipeline_config().stride_samples,
                     show_default="SLEM_STRIDE_SAMPLES", help="Window stride in samples"),
        click.option("--states", "num_states", type=int,
                     default=lambda: get_pipeline_config().num_states,
                     show_default="SLEM_STATES", help="Number of amplitude states m"),
        click.option("--detrend-window", type=int,
                     default=lambda: get_pipeline_config().detrend_window,
                     show_default="SLEM_DETREND_WINDOW", help="Moving-average length in samples"),
        click.option("--quantizer-scope", type=click.Choice(["per-window", "global"]),
                     default=lambda: get_pipeline_config().quantizer_scope,
                     show_default="SLEM_QUANTIZER_SCOPE"),
        click.option("--discard-warmup/--keep-warmup", default=False, show_default=True,
                     help="Drop windows starting before the moving average is full"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def detector_options(f):
    """Decorator adding one flag per DetectorConfig field"""
    options = [
        click.option("--baseline-window", type=int,
                     default=lambda: get_detector_config().baseline_window,
                     show_default="SLEM_BASELINE_WINDOW"),
        click.option("--downsample", "downsample_rate", type=int,
                     default=lambda: get_detector_config().downsample_rate,
                     show_default="SLEM_DOWNSAMPLE_RATE"),
        click.option("--alpha", type=float, default=lambda: get_detector_config().alpha,
                     show_default="SLEM_ALPHA", help="Baseline percentile in corrected mode"),
        click.option("--next-window", type=int,
                     default=lambda: get_detector_config().next_window,
                     show_default="SLEM_NEXT_WINDOW"),
        click.option("--mode", type=click.Choice(["paper", "corrected"]),
                     default=lambda: get_detector_config().mode,
                     show_default="SLEM_DETECTOR_MODE"),
        click.option("--threshold", "threshold_override", type=float, default=None,
                     help="Fixed threshold replacing the percentile rule"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _rps_options(get_config, margin_env):
    """Decorator factory adding one flag per RpsConfig field"""

    def decorator(f):
        options = [
            click.option("--dim", "d", type=int, default=lambda: get_config().d,
                         show_default="RPS_DIM", help="Embedding dimension d"),
            click.option("--tau", type=int, default=lambda: get_config().tau,
                         show_default="RPS_TAU", help="Embedding lag in samples"),
            click.option("--components", type=int, default=lambda: get_config().components,
                         show_default="RPS_COMPONENTS", help="Mixture components K"),
            click.option("--threshold-percentile", type=float,
                         default=lambda: get_config().threshold_percentile,
                         show_default="RPS_THRESHOLD_PERCENTILE"),
            click.option("--window-s", type=float, default=lambda: get_config().window_s,
                         show_default="RPS_WINDOW_S", help="Scoring window in seconds"),
            click.option("--margin-sd", type=float, default=lambda: get_config().margin_sd,
                         show_default=margin_env,
                         help="Baseline score SDs subtracted from the percentile threshold"),
        ]
        for option in reversed(options):
            f = option(f)
        return f

    return decorator


rps_options = _rps_options(get_rps_config, "RPS_MARGIN_SD")
scenario_rps_options = _rps_options(get_scenario_rps_config, "SCENARIO_RPS_MARGIN_SD")


def pipeline_config_from(params):
    return PipelineConfig(**{k: params[k] for k in PipelineConfig.__dataclass_fields__})


def detector_config_from(params):
    return DetectorConfig(**{k: params[k] for k in DetectorConfig.__dataclass_fields__})


def rps_config_from(params):
    fields = ("d", "tau", "components", "threshold_percentile", "window_s", "margin_sd")
    return RpsConfig(**{k: params[k] for k in fields})


def write_slem_series(path, series):
    return write_columns(path, t_s=series.start_times_s, slem=series.values)


@click.command("slem-series")
@series_input_options
@pipeline_options
@output_option
@command_guard
def slem_series_cmd(input_path, column, sample_rate, out, **params):
    """Write the windowed SLEM series of INPUT"""
    ts = load_csv(input_path, column=column, sample_rate_hz=sample_rate)
    series = slem_series(ts, pipeline_config_from(params))

    out_dir = prepare_output_dir(out)
    write_slem_series(out_dir / "slem_series.csv", series)
    finish_run(out_dir, ["slem_series.csv"], inputs=[input_path])
    click.echo(f"{len(series)} SLEM values ({series.gaps} gaps)")


@click.command("detect")
@series_input_options
@pipeline_options
@detector_options
@click.option("--from-slem", is_flag=True,
              help="INPUT already holds a SLEM series (t_s and slem columns, empty "
                   "cells are gaps); --window / --sample-rate give the window length")
@output_option
@command_guard
def detect_cmd(input_path, column, sample_rate, from_slem, out, **params):
    """Run the SLEM change-point detector on INPUT"""
    detector_cfg = detector_config_from(params)
    if detector_cfg.mode == "paper" and detector_cfg.threshold_override is None:
        click.echo(PAPER_MODE_CAVEAT, err=True)

    out_dir = prepare_output_dir(out)
    outputs = ["detection.csv"]
    if from_slem:
        pipeline_cfg = pipeline_config_from(params)
        series = load_slem_series(
            input_path, column=column, window_s=pipeline_cfg.window_samples / sample_rate
        )
        result = detect_change(series, detector_cfg)
    else:
        ts = load_csv(input_path, column=column, sample_rate_hz=sample_rate)
        series = slem_series(ts, pipeline_config_from(params))
        result = detect_change(series, detector_cfg)
        write_slem_series(out_dir / "slem_series.csv", series)
        outputs.append("slem_series.csv")

    write_table(out_dir / "detection.csv", [result.to_row()], DETECTION_COLUMNS)
    finish_run(out_dir, outputs, inputs=[input_path])
    click.echo(
        f"detected={int(result.detected)} first_alarm_index="
        f"{'' if result.first_alarm_index is None else result.first_alarm_index}"
    )


@click.command("rps-detect")
@series_input_options
@rps_options
@click.option("--baseline-s", type=float, required=True, help="Baseline span in seconds")
@click.option("--seed", type=int, required=True, help="Seed for the mixture initialization")
@output_option
@command_guard
def rps_detect_cmd(input_path, column, sample_rate, baseline_s, seed, out, **params):
    """Run the phase-space mixture detector on INPUT"""
    ts = load_csv(input_path, column=column, sample_rate_hz=sample_rate)
    result = rps_detect(ts, baseline_s, rps_config_from(params), seed=seed)

    out_dir = prepare_output_dir(out)
    write_table(out_dir / "detection.csv", [result.to_row()], DETECTION_COLUMNS)
    scores = result.slem_series
    write_columns(
        out_dir / "window_scores.csv",
        t_s=scores.start_times_s,
        loglik=scores.values,
        baseline=(np.arange(len(scores)) < _baseline_windows(scores, baseline_s)).astype(int),
    )
    finish_run(out_dir, ["detection.csv", "window_scores.csv"], seed=seed, inputs=[input_path])
    click.echo(f"detected={int(result.detected)} threshold={result.threshold_used:.6g}")


def _baseline_windows(scores, baseline_s):
    start = scores.start_times_s[0] if len(scores) else 0.0
    return int(np.count_nonzero(scores.end_times_s <= start + baseline_s + 1e-9))
