"""
slemwatch - SLEM change-point detection
Main application module exposing the command-line interface
"""

import logging

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

import click

from commands.chains import build_chain
from commands.comparison import compare_cmd
from commands.detection import detect_cmd, rps_detect_cmd, slem_series_cmd
from commands.measures import measures_cmd
from commands.noise import noise_experiment_cmd
from commands.sweeps import sweep_cmd
from commands.synthesis import synth_group

# Import custom modules
from config import APP_NAME, APP_VERSION, setup_logging
from handlers import UsageExitGroup

logger = logging.getLogger(__name__)


def create_app():
    """Application factory"""

    @click.group(name=APP_NAME, cls=UsageExitGroup)
    @click.version_option(APP_VERSION, prog_name=APP_NAME)
    def app():
        """Markov chain SLEM tracking and change-point detection for time series"""
        setup_logging()

    # Register commands
    app.add_command(build_chain)
    app.add_command(slem_series_cmd)
    app.add_command(detect_cmd)
    app.add_command(rps_detect_cmd)
    app.add_command(synth_group)
    app.add_command(sweep_cmd)
    app.add_command(compare_cmd)
    app.add_command(measures_cmd)
    app.add_command(noise_experiment_cmd)

    return app


app = create_app()

if __name__ == "__main__":
    app()
