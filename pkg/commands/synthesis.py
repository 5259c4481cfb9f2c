"""
Synthesis commands for the slemwatch CLI
"""

import logging
from dataclasses import replace

import click

from handlers import command_guard, finish_run, output_option, prepare_output_dir
from models import BpModelParams, LogisticParams
from synth import generate_bp, generate_bp_scenario, logistic_series
from utils.output_utils import write_columns

logger = logging.getLogger(__name__)


def bp_options(f):
    """Decorator adding the blood-pressure model flags"""
    defaults = BpModelParams()
    options = [
        click.option("--duration", "duration_s", type=float, default=defaults.duration_s,
                     show_default=True, help="Seconds to generate"),
        click.option("--sample-rate", "sfecg_hz", type=float, default=defaults.sfecg_hz,
                     show_default=True, help="Output sampling rate in Hz"),
        click.option("--hrmean", "hrmean_bpm", type=float, default=defaults.hrmean_bpm,
                     show_default=True),
        click.option("--hrstd", "hrstd_bpm", type=float, default=defaults.hrstd_bpm,
                     show_default=True),
        click.option("--lfhfratio", type=float, default=defaults.lfhfratio, show_default=True),
        click.option("--offset", "bp_offset_mmHg", type=float, default=defaults.bp_offset_mmHg,
                     show_default=True, help="Diastolic level in mmHg"),
        click.option("--range", "bp_range_mmHg", type=float, default=defaults.bp_range_mmHg,
                     show_default=True, help="Pulse pressure in mmHg"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def bp_params_from(params, seed):
    keys = ("duration_s", "sfecg_hz", "hrmean_bpm", "hrstd_bpm", "lfhfratio",
            "bp_offset_mmHg", "bp_range_mmHg")
    return replace(BpModelParams(), seed=seed, **{k: params[k] for k in keys})


@click.group("synth")
def synth_group():
    """Generate synthetic series"""
    pass


@synth_group.command("logistic")
@click.option("--mu", type=float, default=3.8, show_default=True)
@click.option("--n", type=int, default=1000, show_default=True, help="Number of samples")
@click.option("--x0", type=float, default=0.3, show_default=True)
@click.option("--noise-mode", type=click.Choice(["none", "measurement", "dynamic"]),
              default="none", show_default=True)
@click.option("--noise-std", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, required=True)
@output_option
@command_guard
def synth_logistic(mu, n, x0, noise_mode, noise_std, seed, out):
    """Logistic map series, optionally with measurement or dynamic noise"""
    ts = logistic_series(LogisticParams(mu, x0, n, noise_mode, noise_std, seed))
    out_dir = prepare_output_dir(out)
    write_columns(out_dir / "series.csv", value=ts.samples)
    finish_run(out_dir, ["series.csv"], seed=seed)
    click.echo(f"Wrote {len(ts)} samples")


@synth_group.command("bp")
@bp_options
@click.option("--seed", type=int, required=True)
@output_option
@command_guard
def synth_bp(seed, out, **params):
    """Artificial blood pressure from the three-ODE model"""
    ts = generate_bp(bp_params_from(params, seed))
    out_dir = prepare_output_dir(out)
    write_columns(out_dir / "series.csv", value=ts.samples)
    finish_run(out_dir, ["series.csv"], seed=seed)
    click.echo(f"Wrote {len(ts)} samples at {ts.sample_rate_hz:g} Hz")


@synth_group.command("scenario")
@bp_options
@click.option("--onset", "onset_s", type=float, default=None,
              help="Seconds at which the ramp starts; omit for a stationary run")
@click.option("--ramp", "ramp_s", type=float, default=60.0, show_default=True)
@click.option("--hrmean-end", type=float, default=100.0, show_default=True)
@click.option("--range-end", type=float, default=25.0, show_default=True)
@click.option("--seed", type=int, required=True)
@output_option
@command_guard
def synth_scenario(onset_s, ramp_s, hrmean_end, range_end, seed, out, **params):
    """Blood pressure with heart rate and pulse pressure ramps (hemorrhage)"""
    ts, tracks = generate_bp_scenario(
        bp_params_from(params, seed), onset_s, ramp_s, hrmean_end, range_end
    )
    out_dir = prepare_output_dir(out)
    write_columns(out_dir / "series.csv", value=ts.samples)
    write_columns(
        out_dir / "tracks.csv",
        t_s=ts.times(),
        heart_rate_bpm=tracks["heart_rate_bpm"],
        systolic_mmHg=tracks["systolic_mmHg"],
    )
    finish_run(out_dir, ["series.csv", "tracks.csv"], seed=seed)
    click.echo(f"Wrote {len(ts)} samples")
