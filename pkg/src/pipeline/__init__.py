"""Pipeline Module"""
from .config import (
    ConfigParseError, ConfigValidationError, ScenarioConfig, build_config,
    load_config, load_logging_settings, parse_config,
)
from .scenario_pipeline import RunResult, ScenarioPipeline, cmd_plot, cmd_run
from .experiments import (
    EXPERIMENTS, ExperimentReport, UnknownExperimentError, cmd_experiment, run_experiment,
)

__all__ = [
    "ConfigParseError", "ConfigValidationError", "ScenarioConfig", "build_config",
    "load_config", "load_logging_settings", "parse_config",
    "RunResult", "ScenarioPipeline", "cmd_plot", "cmd_run",
    "EXPERIMENTS", "ExperimentReport", "UnknownExperimentError", "cmd_experiment",
    "run_experiment",
]
