"""
Co-simulation of the operator model and the machine model.
"""

from .master import (
    CycleOutcome, Trace, TraceRecord, machine_knowledge, replay_operator, run_cycle,
)

__all__ = [
    "CycleOutcome",
    "Trace",
    "TraceRecord",
    "machine_knowledge",
    "replay_operator",
    "run_cycle",
]
