"""
Detector comparison command for the slemwatch CLI
"""

import logging

import click

from commands.detection import (
    detector_config_from,
    detector_options,
    pipeline_config_from,
    pipeline_options,
    rps_config_from,
    scenario_rps_options,
)
from commands.sweeps import parse_values
from config import get_workers
from experiments import compare_detectors, default_scenarios, summarize_comparison
from handlers import command_guard, finish_run, output_option, prepare_output_dir
from utils.output_utils import write_table
from validation import ValidationError

logger = logging.getLogger(__name__)

COMPARISON_COLUMNS = (
    "detector",
    "scenario",
    "seed",
    "detected",
    "alarm_time_s",
    "time_to_detect_s",
    "after_onset",
)
SUMMARY_COLUMNS = (
    "detector",
    "scenario",
    "runs",
    "detection_rate",
    "after_onset_rate",
    "mean_time_to_detect_s",
)


@click.command("compare")
@click.option("--seeds", "seeds_raw", required=True, help="Comma-separated seeds, e.g. 1,2,3")
@click.option("--duration", "duration_s", type=float, default=600.0, show_default=True)
@click.option("--onset", "onset_s", type=float, default=360.0, show_default=True)
@click.option("--ramp", "ramp_s", type=float, default=60.0, show_default=True)
@pipeline_options
@detector_options
@scenario_rps_options
@click.option("--workers", type=int, default=lambda: get_workers(), show_default="SLEM_WORKERS")
@output_option
@command_guard
def compare_cmd(seeds_raw, duration_s, onset_s, ramp_s, workers, out, **params):
    """Run both detectors on stationary and hemorrhage scenarios"""
    seeds = [int(s) for s in parse_values(seeds_raw)]
    if len(set(seeds)) != len(seeds):
        raise ValidationError("--seeds must not repeat")
    scenarios = default_scenarios(duration_s=duration_s, onset_s=onset_s, ramp_s=ramp_s)
    rows = compare_detectors(
        scenarios,
        seeds,
        pipeline_cfg=pipeline_config_from(params),
        detector_cfg=detector_config_from(params),
        rps_cfg=rps_config_from(params),
        workers=workers,
    )
    summary = summarize_comparison(rows)

    out_dir = prepare_output_dir(out)
    write_table(out_dir / "comparison.csv", rows, COMPARISON_COLUMNS)
    write_table(out_dir / "comparison_summary.csv", summary, SUMMARY_COLUMNS)
    finish_run(out_dir, ["comparison.csv", "comparison_summary.csv"], seed=seeds[0])
    for entry in summary:
        click.echo(
            f"{entry['detector']:>5} {entry['scenario']:<11} "
            f"detection rate {entry['detection_rate']:.2f}"
        )
