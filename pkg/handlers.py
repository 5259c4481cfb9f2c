"""
Command handler utilities for the slemwatch CLI
Decorators that map library errors onto exit codes and record run manifests
"""

import logging
from functools import wraps
from pathlib import Path

import click

from config import APP_VERSION, get_output_dir
from models import RunManifest
from utils.output_utils import write_manifest
from validation import NumericalError, ValidationError

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
# sysexits EX_USAGE; click would otherwise reuse 2
EXIT_USAGE = 64

PAPER_MODE_CAVEAT = (
    "note: paper mode thresholds at the 95th percentile of the whole series and "
    "alarms on most inputs; use --mode corrected for a baseline-only threshold"
)


def command_guard(f):
    """Decorator mapping ValidationError to exit 1 and NumericalError to exit 2"""

    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ValidationError as e:
            logger.error(f"{f.__name__}: invalid input: {e}")
            click.echo(f"Error: {e}", err=True)
            raise click.exceptions.Exit(EXIT_VALIDATION)
        except NumericalError as e:
            logger.error(f"{f.__name__}: numerical failure: {e}")
            click.echo(f"Error: {e}", err=True)
            raise click.exceptions.Exit(EXIT_NUMERICAL)

    return decorated_function


class UsageExitGroup(click.Group):
    """click group whose flag and argument errors exit with EXIT_USAGE"""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise


def prepare_output_dir(out):
    """Create the output directory if needed and return it as a Path"""
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def finish_run(out_dir, outputs, seed=None, inputs=()):
    """Write manifest.txt describing the current click command invocation"""
    ctx = click.get_current_context()
    params = {k: _format_param(v) for k, v in ctx.params.items() if k not in ("out", "seed")}
    manifest = RunManifest(
        command=ctx.command_path.split(" ", 1)[-1],
        params=params,
        seed=seed,
        inputs=tuple(str(p) for p in inputs),
        outputs=tuple(outputs),
        version=APP_VERSION,
    )
    path = write_manifest(out_dir, manifest)
    logger.info(f"Wrote {len(outputs)} outputs and {path.name} to {out_dir}")
    return path


def _format_param(value):
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return "" if value is None else value


def series_input_options(f):
    """Decorator adding the INPUT argument with --column and --sample-rate"""
    f = click.option(
        "--sample-rate", "sample_rate", type=float, default=100.0, show_default=True,
        help="Sampling rate of the input in Hz",
    )(f)
    f = click.option(
        "--column", default=None,
        help="Column name or 0-based index [default: 0; slem for SLEM series input]",
    )(f)
    return click.argument("input_path", type=click.Path(dir_okay=False))(f)


def output_option(f):
    """Decorator adding --out, defaulting to SLEM_OUTPUT_DIR"""
    return click.option(
        "--out", default=lambda: get_output_dir(), show_default="SLEM_OUTPUT_DIR",
        help="Directory receiving CSVs and manifest.txt",
    )(f)
