"""Collision-warning radar waveform design and loss evaluation."""

import json

from ._cwsradar import (
    SPEED_OF_LIGHT,
    ConfigError,
    ConvergenceError,
    ErrorModel,
    beat_frequencies,
    conventional_design,
    crlb_range_velocity,
    design_ratio,
    error_index,
    mtwdl,
    optimize_waveform,
    pw_approx,
    pw_glrt,
    pwdl,
    q_function,
    statistic_approx,
    statistic_glrt,
    twdl,
)
from . import _cwsradar

EXPERIMENTS = ("design", "error-sweep", "rule-compare", "mtwdl-tbp", "mtwdl-snr", "ks-check")


def default_config():
    """The built-in evaluation config as a dict."""
    return json.loads(_cwsradar._default_config_json())


def config_hash(config):
    return _cwsradar._config_hash(json.dumps(config))


def run_experiment(name, config=None, monte_carlo=True):
    """Run one experiment. Returns a dict with config_hash, seed, metadata,
    rows as (x, series, value, stderr) tuples, and the CSV text."""
    if config is None:
        config = default_config()
    return _cwsradar._run_experiment(name, json.dumps(config), monte_carlo)
