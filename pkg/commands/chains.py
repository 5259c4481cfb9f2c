"""
Chain commands for the slemwatch CLI
"""

import logging

import click

from config import get_pipeline_config
from handlers import command_guard, finish_run, output_option, prepare_output_dir, series_input_options
from markov import build_transition_matrix, density, gershgorin, self_transition_probability
from spectral import eigen_decompose
from timeseries import load_csv
from utils.output_utils import write_matrix, write_table

logger = logging.getLogger(__name__)


@click.command("build-chain")
@series_input_options
@click.option(
    "--states", type=int, default=lambda: get_pipeline_config().num_states,
    show_default="SLEM_STATES", help="Number of amplitude states m",
)
@output_option
@command_guard
def build_chain(input_path, column, sample_rate, states, out):
    """Build the transition matrix of INPUT and write its spectrum"""
    ts = load_csv(input_path, column=column, sample_rate_hz=sample_rate)
    tm = build_transition_matrix(ts, states)
    summary = eigen_decompose(tm)
    bound = gershgorin(tm)

    out_dir = prepare_output_dir(out)
    write_matrix(out_dir / "transition_matrix.csv", tm.probs)
    write_table(
        out_dir / "spectrum.csv",
        [{"re": re, "im": im, "modulus": mod} for re, im, mod in summary.to_rows()],
        ("re", "im", "modulus"),
    )
    write_table(
        out_dir / "chain_summary.csv",
        [
            {
                "states": tm.num_states,
                "unvisited_states": tm.zero_rows.size,
                "slem_modulus": summary.slem_modulus,
                "slem_re": summary.slem_value.real,
                "slem_im": summary.slem_value.imag,
                "density": density(tm),
                "self_transition": self_transition_probability(tm),
                "gershgorin_lower": bound.lower,
                "gershgorin_upper": bound.upper,
            }
        ],
        (
            "states",
            "unvisited_states",
            "slem_modulus",
            "slem_re",
            "slem_im",
            "density",
            "self_transition",
            "gershgorin_lower",
            "gershgorin_upper",
        ),
    )
    finish_run(
        out_dir,
        ["transition_matrix.csv", "spectrum.csv", "chain_summary.csv"],
        inputs=[input_path],
    )
    click.echo(f"SLEM modulus: {summary.slem_modulus:.12g}")
