"""Scenario configuration, Monte-Carlo execution, traces and acceptance checks."""
from .config import ConfigError, FilterSpec, ScenarioConfig, load_config, loads_config, make_filter
from .runner import ScenarioResult, generate_run, run_filter, run_scenario
from .scenarios import BUILTIN_SCENARIOS, get_scenario
from .trace import ConvergenceTrace, RunTrace, summarize, write_csv

__all__ = [
    "BUILTIN_SCENARIOS", "ConfigError", "ConvergenceTrace", "FilterSpec", "RunTrace",
    "ScenarioConfig", "ScenarioResult", "generate_run", "get_scenario", "load_config",
    "loads_config", "make_filter", "run_filter", "run_scenario", "summarize", "write_csv",
]
