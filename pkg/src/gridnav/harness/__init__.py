"""Scenario harness: config files, traces, metrics, suite ordering, plots, CLI."""
from .compare import MissingScenario, compare_suite
from .config import ConfigInvalid, Scenario, dump, load, parse
from .runner import builtin, run_file, run_scenario, scenarios_dir

__all__ = [
    "ConfigInvalid",
    "MissingScenario",
    "Scenario",
    "builtin",
    "compare_suite",
    "dump",
    "load",
    "parse",
    "run_file",
    "run_scenario",
    "scenarios_dir",
]
