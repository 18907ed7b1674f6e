"""
Scenario Pipeline
=================

Main orchestration of a single scenario:
- Plant selection from the registry
- Co-simulation of one loading cycle
- KPI extraction
- Result files (trace CSV, KPI listing, metadata, diagnostic plots)
"""

import os
import time
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from ..cosim.master import Trace, run_cycle
from ..metrics.export import emit_csv, emit_cycle_plots, read_trace_csv, write_kpis
from ..metrics.series import CycleKpis, cycle_kpis, series_from_frame, series_from_trace
from ..plant import PlantRegistry
from ..plant.base_plant import BasePlant
from ..utils.helpers import ensure_directory, save_json
from .config import ScenarioConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@dataclass
class RunResult:
    """Result of running a single scenario"""
    name: str
    trace: Trace
    kpis: Optional[CycleKpis] = None
    outputs: Dict[str, str] = field(default_factory=dict)
    processing_time: float = 0.0

    @property
    def success(self) -> bool:
        return self.trace.completed and self.kpis is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            **self.trace.to_dict(),
            "kpis": self.kpis.to_dict() if self.kpis else None,
            "outputs": self.outputs,
            "processing_time": self.processing_time,
            "success": self.success,
        }


class ScenarioPipeline:
    """
    Scenario Pipeline

    Runs one configured loading cycle:
    1. Create the configured plant
    2. Simulate the cycle against the operator model
    3. Compute KPIs when the cycle completed
    4. Write the result files
    """

    def __init__(self, config: ScenarioConfig):
        """
        Initialize the pipeline.

        Args:
            config: Validated scenario configuration
        """
        self.config = config
        logger.info(f"ScenarioPipeline initialized for '{config.name}'")

    def build_plant(self) -> BasePlant:
        return PlantRegistry.create(self.config.plant, self.config.machine)

    def simulate(self) -> Trace:
        """Run the cycle and return its trace"""
        cfg = self.config
        return run_cycle(
            cfg.machine,
            cfg.operator,
            cfg.dt,
            cfg.t_max,
            plant=self.build_plant(),
            metadata={"config_digest": cfg.digest, "scenario": cfg.name},
            h0=cfg.h0,
            phi0=cfg.phi0,
        )

    def run(self, output_dir: Optional[str] = None, write: bool = True) -> RunResult:
        """
        Run the complete scenario.

        Args:
            output_dir: Result directory, defaults to the configured one
            write: Write result files

        Returns:
            RunResult with trace, KPIs and written file paths
        """
        start_time = time.perf_counter()
        trace = self.simulate()

        kpis = None
        if trace.completed:
            kpis = cycle_kpis(trace, self.config.layout)
            logger.info(
                f"Scenario '{self.config.name}': cycle {kpis.cycle_time:.2f}s, reversing "
                f"{kpis.reversing_distance_to_receiver:.2f}m from the receiver, "
                f"arrival height {kpis.arrival_height:.2f}m"
            )
        else:
            logger.error(f"Scenario '{self.config.name}' ended with {trace.outcome.value}: {trace.error}")

        result = RunResult(name=self.config.name, trace=trace, kpis=kpis)
        if write:
            result.outputs = self.export(result, output_dir or self.config.output_dir)
        result.processing_time = time.perf_counter() - start_time
        return result

    def export(self, result: RunResult, output_dir: str) -> Dict[str, str]:
        """Write trace.csv, kpis.txt, metadata.json and the plots"""
        ensure_directory(output_dir)
        trace = result.trace
        outputs = {
            "trace": emit_csv(trace, os.path.join(output_dir, "trace.csv")),
            "kpis": write_kpis(result.kpis, trace.metadata, trace.outcome.value,
                               os.path.join(output_dir, "kpis.txt")),
            "metadata": save_json(
                {**trace.to_dict(), "config": dict(self.config.items())},
                os.path.join(output_dir, "metadata.json"),
            ),
        }
        outputs.update(emit_cycle_plots(series_from_trace(trace), output_dir, self.config.name))
        logger.info(f"Exported results to: {output_dir}")
        return outputs


def cmd_run(config: ScenarioConfig, output_dir: Optional[str] = None) -> int:
    """Run a scenario and print its KPIs; exit status 0 when the cycle completed"""
    result = ScenarioPipeline(config).run(output_dir)

    print(f"Scenario: {result.name}")
    print(f"Outcome:  {result.trace.outcome.value}")
    if result.kpis is not None:
        for key, value in result.kpis.to_dict().items():
            print(f"  {key}: {value}")
    for name, path in result.outputs.items():
        print(f"  [{name}] {path}")
    return EXIT_OK if result.success else EXIT_FAILED


def cmd_plot(trace_path: str, output_dir: Optional[str] = None) -> int:
    """Regenerate the plots of a written trace"""
    frame = read_trace_csv(trace_path)
    output_dir = output_dir or os.path.dirname(os.path.abspath(trace_path))
    emit_cycle_plots(series_from_frame(frame), output_dir)
    return EXIT_OK
