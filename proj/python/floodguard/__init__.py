"""Python access to the flooding-attack defense simulator."""

import json

from ._floodguard import (
    ConfigError,
    IoError,
    ScenarioParseError,
    UsageError,
    derive_run_seed,
    ewma,
    preset_names,
    show,
    validate,
)
from ._floodguard import run as _run
from ._floodguard import sweep

__all__ = [
    "ConfigError",
    "IoError",
    "ScenarioParseError",
    "UsageError",
    "derive_run_seed",
    "ewma",
    "preset_names",
    "run",
    "show",
    "sweep",
    "validate",
]


def _overrides(params):
    return "".join(f"{k} = {str(v).lower() if isinstance(v, bool) else v}\n"
                   for k, v in params.items())


def run(scenario="default", seed=0, defense=None, logs=False, **params):
    """Single run. Keyword parameters override scenario keys.

    Returns the report as a dict; with logs=True also the trace and
    detection log text under "trace" and "detect_log".
    """
    out = _run(scenario, seed, defense, _overrides(params), logs)
    report = json.loads(out["report"])
    if logs:
        report["trace"] = out["trace"]
        report["detect_log"] = out["detect_log"]
    return report
