"""
Configuration utilities for the slemwatch command-line application
"""

import logging
import os
from dataclasses import replace

from models import DetectorConfig, PipelineConfig, RpsConfig

logger = logging.getLogger(__name__)

APP_NAME = "slemwatch"
APP_VERSION = "0.3.0"

# scenario runs place the phase-space threshold this many baseline SDs lower
SCENARIO_RPS_MARGIN_SD = 2.0


def _env_int(name, default):
    """Read an integer environment variable, falling back on bad values"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


def _env_float(name, default):
    """Read a float environment variable, falling back on bad values"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning(f"Ignoring non-numeric {name}={raw!r}, using {default}")
        return default


def get_pipeline_config():
    """Get SLEM pipeline configuration (windowing, states, detrending)"""
    return PipelineConfig(
        window_samples=_env_int("SLEM_WINDOW_SAMPLES", 2000),
        stride_samples=_env_int("SLEM_STRIDE_SAMPLES", 100),
        num_states=_env_int("SLEM_STATES", 10),
        detrend_window=_env_int("SLEM_DETREND_WINDOW", 2000),
        quantizer_scope=os.getenv("SLEM_QUANTIZER_SCOPE", "per-window").lower(),
    )


def get_detector_config():
    """Get change-point detector configuration"""
    return DetectorConfig(
        baseline_window=_env_int("SLEM_BASELINE_WINDOW", 75),
        downsample_rate=_env_int("SLEM_DOWNSAMPLE_RATE", 4),
        alpha=_env_float("SLEM_ALPHA", 5.0),
        next_window=_env_int("SLEM_NEXT_WINDOW", 4),
        mode=os.getenv("SLEM_DETECTOR_MODE", "paper").lower(),
    )


def get_rps_config():
    """Get reconstructed phase space detector configuration"""
    return RpsConfig(
        d=_env_int("RPS_DIM", 3),
        tau=_env_int("RPS_TAU", 1),
        components=_env_int("RPS_COMPONENTS", 4),
        threshold_percentile=_env_float("RPS_THRESHOLD_PERCENTILE", 1.0),
        window_s=_env_float("RPS_WINDOW_S", 5.0),
        margin_sd=_env_float("RPS_MARGIN_SD", 0.0),
    )


def get_scenario_rps_config():
    """Phase-space detector configuration for the synthetic scenario comparison"""
    margin_sd = _env_float("SCENARIO_RPS_MARGIN_SD", SCENARIO_RPS_MARGIN_SD)
    return replace(get_rps_config(), margin_sd=margin_sd)


def get_workers():
    """Number of parallel workers for sweeps and comparisons"""
    return max(1, _env_int("SLEM_WORKERS", 1))


def get_output_dir():
    """Default directory for command outputs"""
    return os.getenv("SLEM_OUTPUT_DIR", "./outputs")


def setup_logging():
    """Setup application logging"""
    log_level = os.getenv("LOG_LEVEL", "INFO").upper()
    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    logging.basicConfig(level=getattr(logging, log_level, logging.INFO), format=log_format)

    # Set specific logger levels
    logging.getLogger("joblib").setLevel(logging.WARNING)
    logging.getLogger("numexpr").setLevel(logging.WARNING)
