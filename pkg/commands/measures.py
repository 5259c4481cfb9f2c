"""
Measures command for the slemwatch CLI
"""

import logging

import click

from commands.detection import pipeline_config_from, pipeline_options
from experiments import MEASURE_COLUMNS, TRACK_COLUMNS, scenario_signal, window_measures
from handlers import command_guard, finish_run, output_option, prepare_output_dir
from models import Scenario
from timeseries import load_csv
from utils.output_utils import write_table
from validation import ValidationError

logger = logging.getLogger(__name__)


@click.command("measures")
@click.argument("input_path", required=False, type=click.Path(dir_okay=False))
@click.option("--column", default="0", show_default=True)
@click.option("--sample-rate", type=float, default=100.0, show_default=True)
@click.option("--scenario", type=click.Choice(["stationary", "hemorrhage"]), default=None,
              help="Generate a synthetic run instead of reading INPUT")
@click.option("--duration", "duration_s", type=float, default=600.0, show_default=True)
@click.option("--onset", "onset_s", type=float, default=120.0, show_default=True)
@click.option("--ramp", "ramp_s", type=float, default=300.0, show_default=True)
@click.option("--seed", type=int, default=None, help="Required with --scenario")
@pipeline_options
@output_option
@command_guard
def measures_cmd(
    input_path, column, sample_rate, scenario, duration_s, onset_s, ramp_s, seed, out, **params
):
    """Per-window SLEM, smoothness and matrix measures with their correlations"""
    if (input_path is None) == (scenario is None):
        raise ValidationError("give either INPUT or --scenario")
    tracks = None
    inputs = []
    if scenario is not None:
        if seed is None:
            raise ValidationError("--seed is required with --scenario")
        run = Scenario(
            name=scenario,
            duration_s=duration_s,
            onset_s=onset_s if scenario == "hemorrhage" else None,
            ramp_s=ramp_s,
        )
        ts, tracks = scenario_signal(run, seed)
    else:
        ts = load_csv(input_path, column=column, sample_rate_hz=sample_rate)
        inputs = [input_path]

    rows, correlations = window_measures(ts, pipeline_config_from(params), tracks=tracks)

    columns = ["t_s", *MEASURE_COLUMNS]
    if tracks is not None:
        columns += list(TRACK_COLUMNS)
    out_dir = prepare_output_dir(out)
    write_table(out_dir / "measures.csv", rows, columns)
    write_table(
        out_dir / "correlations.csv",
        [{"measure": k, "r_with_slem": v} for k, v in correlations.items()],
        ("measure", "r_with_slem"),
    )
    finish_run(out_dir, ["measures.csv", "correlations.csv"], seed=seed, inputs=inputs)
    for measure, r in correlations.items():
        click.echo(f"r(slem, {measure}) = {r:.3f}")
