"""Dimerization in atomic arrays: least radiant states, RVB overlaps, driven steady states."""

import json as _json

from ._dimerlab import *  # noqa: F401,F403
from ._dimerlab import _resolve_config, _run_experiment

__version__ = version()  # noqa: F405


def resolve_config(config):
    """Merge a config dict over its preset defaults and return the full echo."""
    return _json.loads(_resolve_config(_json.dumps(config)))


def run_experiment(config):
    """Run a config dict; returns (csv paths, max eigen residual, max steady residual)."""
    files, eig, steady = _run_experiment(_json.dumps(config))
    return [str(f) for f in files], eig, steady
