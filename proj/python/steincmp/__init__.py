"""Relative kernel Stein tests for latent-variable models."""

import json as _json

from ._steincmp import (
    ConfigError,
    GdpmModel,
    LdaModel,
    PpcaModel,
    gaussian_mmd_sq_diff,
    kernel,
    ksd_ustat,
    model_gram,
    normal_quantile,
    relative_test,
    variance,
)
from ._steincmp import run_experiment as _run_experiment


def run_experiment(config):
    """Run an experiment config (dict or JSON text); returns the CSV table as text."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_experiment(config)


__all__ = [
    "ConfigError",
    "GdpmModel",
    "LdaModel",
    "PpcaModel",
    "gaussian_mmd_sq_diff",
    "kernel",
    "ksd_ustat",
    "model_gram",
    "normal_quantile",
    "relative_test",
    "run_experiment",
    "variance",
]
