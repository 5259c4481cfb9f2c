"""
Logistic noise experiment command for the slemwatch CLI
"""

import logging

import click

from commands.sweeps import parse_values
from handlers import command_guard, finish_run, output_option, prepare_output_dir
from synth import noise_experiment
from utils.output_utils import write_table

logger = logging.getLogger(__name__)

ROW_COLUMNS = (
    "seed",
    "norm_measurement",
    "norm_dynamic",
    "measurement_closer",
    "slem_none",
    "slem_measurement",
    "slem_dynamic",
    "complex_slem_none",
    "complex_slem_measurement",
    "complex_slem_dynamic",
    "limit_distance_measurement",
    "limit_distance_dynamic",
    "acf_distance_measurement",
    "acf_distance_dynamic",
)


@click.command("noise-experiment")
@click.option("--seeds", "seeds_raw", required=True, help="Comma-separated seeds")
@click.option("--mu", type=float, default=3.8, show_default=True)
@click.option("--n", type=int, default=1000, show_default=True)
@click.option("--states", type=int, default=10, show_default=True)
@click.option("--x0", type=float, default=0.3, show_default=True)
@click.option("--measurement-std", type=float, default=0.1, show_default=True)
@click.option("--dynamic-std", type=float, default=0.02, show_default=True)
@output_option
@command_guard
def noise_experiment_cmd(seeds_raw, mu, n, states, x0, measurement_std, dynamic_std, out):
    """Compare logistic chains under measurement and dynamic noise"""
    seeds = [int(s) for s in parse_values(seeds_raw)]
    rows, summary = noise_experiment(
        seeds, mu=mu, n=n, num_states=states, x0=x0,
        measurement_std=measurement_std, dynamic_std=dynamic_std,
    )
    out_dir = prepare_output_dir(out)
    write_table(out_dir / "noise_runs.csv", rows, ROW_COLUMNS)
    write_table(out_dir / "noise_summary.csv", [summary], list(summary))
    finish_run(out_dir, ["noise_runs.csv", "noise_summary.csv"], seed=seeds[0])
    for key, value in summary.items():
        click.echo(f"{key}: {value}")
