"""Sequestration network simulator and its scaling limits."""

import json

from ._seqnet import (
    ConfigError,
    KineticParams,
    OdeError,
    Regime,
    SimulationError,
    classify_regime,
    fastinv_dist,
    fixed_point,
    integrate_limit,
    mm_inf_invariant,
    regime_fast_dist,
    regime_fast_labels,
    run_cli,
    sequestration_index,
    simulate,
    stability_report,
    tv_distance,
)
from ._seqnet import run_experiment as _run_experiment


def run_experiment(config):
    """Run a convergence experiment. `config` is a dict or JSON text."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_run_experiment(text))


__all__ = [
    "ConfigError",
    "KineticParams",
    "OdeError",
    "Regime",
    "SimulationError",
    "classify_regime",
    "fastinv_dist",
    "fixed_point",
    "integrate_limit",
    "mm_inf_invariant",
    "regime_fast_dist",
    "regime_fast_labels",
    "run_cli",
    "run_experiment",
    "sequestration_index",
    "simulate",
    "stability_report",
    "tv_distance",
]
