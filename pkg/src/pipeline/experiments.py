"""
Adaptation Experiments
======================

Scenario pairs showing how the operator model adapts its reversing point:

- layout:       receiver distance b versus 1.5 b
- lift:         nominal lifting speed versus half of it
- bucketheight: bucket leaving the bank low versus high

Each experiment writes both runs, overlaid location and harmony plots and a
KPI comparison table, then checks the expected direction of the effect.
"""

import os
import re
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import pandas as pd

from ..metrics.series import harmony_series, location_series
from ..operator_model.state import Phase
from ..utils.helpers import ensure_directory
from ..visualization.svg_plot import emit_svg
from .config import ScenarioConfig
from .scenario_pipeline import EXIT_FAILED, EXIT_OK, RunResult, ScenarioPipeline

logger = logging.getLogger(__name__)

# Lifting-speed reduction applied in the lift and bucketheight experiments
REDUCED_LIFT_SCALE = 0.5
LOW_BUCKET_HEIGHT = 0.5
HIGH_BUCKET_HEIGHT = 1.5
MIN_REVERSING_SHIFT = 1.0
MAX_EXTRA_LIFT_TIME = 2.0


class UnknownExperimentError(ValueError):
    """Experiment name not recognised"""
    pass


@dataclass
class ExperimentCase:
    """One scenario of an experiment"""
    label: str
    config: ScenarioConfig

    @property
    def slug(self) -> str:
        return re.sub(r"[^A-Za-z0-9_.-]+", "_", self.label)


@dataclass
class ExperimentReport:
    """Runs, comparison table and direction-of-effect checks of one experiment"""
    name: str
    results: List[RunResult]
    table: pd.DataFrame
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


# =============================================================================
# CASES
# =============================================================================

def _layout_cases(config: ScenarioConfig) -> List[ExperimentCase]:
    b = config.layout.b
    return [
        ExperimentCase(f"b={b:g}", config.with_overrides(name="layout_b")),
        ExperimentCase(f"b={1.5 * b:g}", config.with_layout(b=1.5 * b).with_overrides(name="layout_1.5b")),
    ]


def _lift_cases(config: ScenarioConfig) -> List[ExperimentCase]:
    return [
        ExperimentCase("lift_scale=1", config.with_machine(lift_scale=1.0).with_overrides(name="lift_full")),
        ExperimentCase(
            f"lift_scale={REDUCED_LIFT_SCALE:g}",
            config.with_machine(lift_scale=REDUCED_LIFT_SCALE).with_overrides(name="lift_reduced"),
        ),
    ]


def _bucketheight_cases(config: ScenarioConfig) -> List[ExperimentCase]:
    # Reduced lifting speed so that the remaining lift decides the reversing point.
    slow = config.with_machine(lift_scale=REDUCED_LIFT_SCALE)
    return [
        ExperimentCase(
            f"h_init={LOW_BUCKET_HEIGHT:g}",
            slow.with_operator(h_init=LOW_BUCKET_HEIGHT).with_overrides(name="bucket_low"),
        ),
        ExperimentCase(
            f"h_init={HIGH_BUCKET_HEIGHT:g}",
            slow.with_operator(h_init=HIGH_BUCKET_HEIGHT).with_overrides(name="bucket_high"),
        ),
    ]


EXPERIMENTS: Dict[str, Callable[[ScenarioConfig], List[ExperimentCase]]] = {
    "layout": _layout_cases,
    "lift": _lift_cases,
    "bucketheight": _bucketheight_cases,
}


def experiment_cases(name: str, config: ScenarioConfig) -> List[ExperimentCase]:
    """
    Scenario pair of the named experiment.

    Raises:
        UnknownExperimentError: name is not an experiment
    """
    if name not in EXPERIMENTS:
        raise UnknownExperimentError(
            f"Unknown experiment '{name}', available: {', '.join(sorted(EXPERIMENTS))}"
        )
    return EXPERIMENTS[name](config)


# =============================================================================
# CHECKS
# =============================================================================

def _completed(results: List[RunResult]) -> Dict[str, bool]:
    return {f"{r.name} completed": r.success for r in results}


def _reversing_distances(results: List[RunResult]) -> Optional[Tuple[float, float]]:
    if not all(r.success for r in results):
        return None
    first, second = results
    return (first.kpis.reversing_distance_to_receiver,
            second.kpis.reversing_distance_to_receiver)


def _emptying_height(result: RunResult) -> Optional[float]:
    for record in result.trace.records:
        if record.phase is Phase.EMPTYING:
            return record.fb.h
    return None


def adaptation_checks(name: str, cases: List[ExperimentCase],
                      results: List[RunResult]) -> Dict[str, bool]:
    """Expected direction of effect for each experiment"""
    checks = _completed(results)
    distances = _reversing_distances(results)

    if name == "lift":
        checks["reversing point farther with slower lift"] = (
            distances is not None and distances[1] > distances[0] + MIN_REVERSING_SHIFT
        )
        reduced = results[1]
        height = _emptying_height(reduced)
        checks["slower lift empties above the receiver"] = (
            height is not None and height >= cases[1].config.operator.h_empty
        )
        checks["extra lift within limit"] = (
            reduced.kpis is not None
            and reduced.kpis.phase_durations.get(Phase.EXTRA_LIFT.label, 0.0) <= MAX_EXTRA_LIFT_TIME
        )
    elif name == "bucketheight":
        checks["reversing point nearer with higher bucket"] = (
            distances is not None and distances[1] < distances[0]
        )
    return checks


# =============================================================================
# RUNNING
# =============================================================================

def _run_case(args: Tuple[ExperimentCase, str]) -> RunResult:
    case, output_dir = args
    return ScenarioPipeline(case.config).run(output_dir)


def comparison_table(cases: List[ExperimentCase], results: List[RunResult]) -> pd.DataFrame:
    rows = []
    for case, result in zip(cases, results):
        row = {"case": case.label, "outcome": result.trace.outcome.value}
        if result.kpis is not None:
            row.update(result.kpis.to_dict())
        rows.append(row)
    return pd.DataFrame(rows).set_index("case")


def run_experiment(name: str, config: ScenarioConfig, output_dir: Optional[str] = None,
                   jobs: int = 1) -> ExperimentReport:
    """
    Run both scenarios of an experiment and write the comparison.

    Args:
        name: layout, lift or bucketheight
        config: Base scenario
        output_dir: Result directory, defaults to <configured output>/<name>
        jobs: Worker processes for the scenario runs

    Returns:
        ExperimentReport
    """
    cases = experiment_cases(name, config)
    root = ensure_directory(output_dir or os.path.join(config.output_dir, name))
    work = [(case, os.path.join(root, case.slug)) for case in cases]

    logger.info(f"Running experiment '{name}' with {len(cases)} scenarios")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_case, work))
    else:
        results = [_run_case(item) for item in work]

    emit_svg({c.label: location_series(r.trace) for c, r in zip(cases, results)},
             os.path.join(root, "location.svg"), title=f"{name}: machine location",
             x_label="x [m]", y_label="z [m]", equal_aspect=True)
    emit_svg({c.label: harmony_series(r.trace) for c, r in zip(cases, results)},
             os.path.join(root, "harmony.svg"), title=f"{name}: bucket height over travelled distance",
             x_label="travelled distance [m]", y_label="bucket height [m]")

    table = comparison_table(cases, results)
    table.to_csv(os.path.join(root, "comparison.csv"), float_format="%.15g", lineterminator="\n")

    report = ExperimentReport(name=name, results=results, table=table,
                              checks=adaptation_checks(name, cases, results))
    with open(os.path.join(root, "comparison.txt"), "w", encoding="utf-8", newline="\n") as f:
        f.write(table.T.to_string() + "\n\n")
        for check, ok in report.checks.items():
            f.write(f"{'PASS' if ok else 'FAIL'}  {check}\n")

    for check, ok in report.checks.items():
        if ok:
            logger.info(f"Experiment '{name}': {check}")
        else:
            logger.warning(f"Experiment '{name}' check failed: {check}")
    return report


def cmd_experiment(name: str, config: ScenarioConfig, output_dir: Optional[str] = None,
                   jobs: int = 1) -> int:
    """Run an experiment and print the comparison; exit status 0 when every check holds"""
    report = run_experiment(name, config, output_dir, jobs)

    print(f"Experiment: {report.name}")
    print(report.table.T.to_string())
    for check, ok in report.checks.items():
        print(f"  {'PASS' if ok else 'FAIL'}  {check}")
    return EXIT_OK if report.passed else EXIT_FAILED
