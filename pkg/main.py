#!/usr/bin/env python3
"""
Loader Cycle Simulator - Main Entry Point
=========================================

Run short-loading-cycle scenarios and adaptation experiments from the
command line.

Usage:
    python main.py run config/config.yaml
    python main.py run config/tight_layout.cfg --out results/tight --dt 0.005
    python main.py experiment lift config/config.yaml --jobs 2
    python main.py plot results/nominal/trace.csv

Exit status: 0 ok, 1 cycle or experiment check failed, 2 usage or I/O error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.pipeline.config import (
    ConfigParseError, ConfigValidationError, load_config, load_logging_settings,
)
from src.pipeline.experiments import EXPERIMENTS, UnknownExperimentError, cmd_experiment
from src.pipeline.scenario_pipeline import EXIT_USAGE, cmd_plot, cmd_run
from src.plant.base_plant import PlantRegistryError
from src.utils.helpers import setup_logging

logger = logging.getLogger("sim")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Wheel loader short loading cycle simulator"
    )
    parser.add_argument(
        "--log-level", "-l",
        type=str,
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: INFO, or the scenario's logging.level)"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def scenario_options(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("config", type=str, help="Scenario file (.cfg or .yaml)")
        sub.add_argument("--out", "-o", type=str, default=None, help="Output directory")
        sub.add_argument("--dt", type=float, default=None, help="Exchange step in seconds")
        sub.add_argument("--t-max", type=float, default=None, help="Simulated time limit in seconds")

    run = commands.add_parser("run", help="Simulate one loading cycle")
    scenario_options(run)

    experiment = commands.add_parser("experiment", help="Run an adaptation experiment")
    experiment.add_argument("name", type=str, choices=sorted(EXPERIMENTS), help="Experiment")
    scenario_options(experiment)
    experiment.add_argument("--jobs", "-j", type=int, default=1,
                            help="Scenarios simulated in parallel")

    plot = commands.add_parser("plot", help="Regenerate plots from a trace CSV")
    plot.add_argument("trace", type=str, help="trace.csv written by 'run'")
    plot.add_argument("--out", "-o", type=str, default=None, help="Output directory")

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    settings = {}
    if getattr(args, "config", None):
        try:
            settings = load_logging_settings(args.config)
        except (OSError, ValueError):
            settings = {}
    level = args.log_level or str(settings.get("level", "INFO")).upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
        level = "INFO"
    setup_logging(level, settings.get("file"))


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    try:
        if args.command in ("run", "experiment"):
            config = load_config(args.config).with_overrides(dt=args.dt, t_max=args.t_max)
            if args.command == "run":
                return cmd_run(config, args.out)
            return cmd_experiment(args.name, config, args.out, args.jobs)
        try:
            return cmd_plot(args.trace, args.out)
        except ValueError as e:
            raise ConfigParseError(f"unreadable trace {args.trace}: {e}") from e
    except (ConfigParseError, ConfigValidationError, UnknownExperimentError, PlantRegistryError) as e:
        logger.error(f"Invalid scenario: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
