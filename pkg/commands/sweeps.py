"""
Sweep commands for the slemwatch CLI
"""

import logging

import click

from commands.synthesis import bp_options, bp_params_from
from config import get_pipeline_config, get_workers
from handlers import command_guard, finish_run, output_option, prepare_output_dir
from models import BpModelParams, SlemConfig
from synth import sweep_parameter
from utils.output_utils import write_table
from validation import ValidationError

logger = logging.getLogger(__name__)


def parse_values(raw):
    """Comma-separated floats"""
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"--values must be comma-separated numbers, got {raw!r}")


@click.command("sweep")
@click.option("--param", type=click.Choice(list(BpModelParams.SWEEPABLE)), required=True)
@click.option("--values", "values_raw", required=True, help="Comma-separated values, e.g. 50,60,70")
@bp_options
@click.option("--states", type=int, default=lambda: get_pipeline_config().num_states,
              show_default="SLEM_STATES")
@click.option("--window", type=int, default=lambda: get_pipeline_config().window_samples,
              show_default="SLEM_WINDOW_SAMPLES")
@click.option("--stride", type=int, default=lambda: get_pipeline_config().stride_samples,
              show_default="SLEM_STRIDE_SAMPLES")
@click.option("--workers", type=int, default=lambda: get_workers(), show_default="SLEM_WORKERS")
@click.option("--seed", type=int, required=True)
@output_option
@command_guard
def sweep_cmd(param, values_raw, states, window, stride, workers, seed, out, **params):
    """Mean SLEM of generated blood pressure across one model parameter"""
    base = bp_params_from(params, seed)
    slem_config = SlemConfig(num_states=states, window_samples=window, stride_samples=stride)
    result = sweep_parameter(base, param, parse_values(values_raw), slem_config, workers=workers)

    out_dir = prepare_output_dir(out)
    write_table(
        out_dir / "sweep.csv",
        [{"value": v, "mean_slem": s} for v, s in result.to_rows()],
        ("value", "mean_slem"),
    )
    write_table(
        out_dir / "sweep_summary.csv",
        [{"parameter": result.parameter, "r": result.r, "slope": result.slope}],
        ("parameter", "r", "slope"),
    )
    finish_run(out_dir, ["sweep.csv", "sweep_summary.csv"], seed=seed)
    click.echo(f"{param}: r={result.r:.4f} slope={result.slope:.4g}")
