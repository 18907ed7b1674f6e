"""
Operator Model State
====================

Phases of the short loading cycle, the operator's configuration and the
bookkeeping carried from one tick to the next.
"""

import math
import logging
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Any

from ..geom.pose import Pose
from ..geom.vpath import VPathPlan, WorkplaceLayout
from .estimator import EstimatorState

logger = logging.getLogger(__name__)


class PhaseTimeoutError(RuntimeError):
    """A phase could not complete within its allotted time"""
    pass


class Phase(Enum):
    """Cycle phases, labelled as in the loading-cycle description"""
    INIT = "0"
    TILT_BACK = "1a"
    LEAVING_BANK = "2"
    TURN_LIMITED = "2a"
    RETARDATION = "3"
    REVERSING = "4"
    TOWARD_RECEIVER = "5"
    EXTRA_LIFT = "5a"
    EMPTYING = "6"
    DONE = "done"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def from_label(cls, label: str) -> "Phase":
        for phase in cls:
            if phase.value == label:
                return phase
        raise ValueError(f"Unknown phase label '{label}'")


ALLOWED_TRANSITIONS: Dict[Phase, FrozenSet[Phase]] = {
    Phase.INIT: frozenset({Phase.TILT_BACK}),
    Phase.TILT_BACK: frozenset({Phase.LEAVING_BANK}),
    Phase.LEAVING_BANK: frozenset({Phase.TURN_LIMITED, Phase.RETARDATION}),
    Phase.TURN_LIMITED: frozenset({Phase.RETARDATION}),
    Phase.RETARDATION: frozenset({Phase.REVERSING}),
    Phase.REVERSING: frozenset({Phase.TOWARD_RECEIVER}),
    Phase.TOWARD_RECEIVER: frozenset({Phase.EXTRA_LIFT, Phase.EMPTYING}),
    Phase.EXTRA_LIFT: frozenset({Phase.EMPTYING}),
    Phase.EMPTYING: frozenset({Phase.DONE}),
    Phase.DONE: frozenset(),
}


def is_monotone(phases: List[Phase]) -> bool:
    """True if the sequence only moves along allowed edges, never re-entering a phase"""
    seen = set()
    previous = None
    for phase in phases:
        if phase is previous:
            continue
        if phase in seen:
            return False
        if previous is not None and phase not in ALLOWED_TRANSITIONS[previous]:
            return False
        seen.add(phase)
        previous = phase
    return True


@dataclass(frozen=True)
class MachineKnowledge:
    """What an experienced operator knows about the machine's steering and bucket"""
    l_f: float = 1.5
    l_r: float = 1.5
    gamma_max: float = math.radians(35.0)
    tilt_min: float = math.radians(-45.0)
    tilt_max: float = math.radians(50.0)


@dataclass(frozen=True)
class OperatorConfig:
    """Targets, tolerances and habits of the simulated operator"""
    layout: WorkplaceLayout = field(default_factory=lambda: WorkplaceLayout(10.0, 10.0))
    machine: MachineKnowledge = field(default_factory=MachineKnowledge)
    h_empty: float = 3.2
    h_init: float = 0.5
    phi_init: float = 0.0
    v_safe: float = 0.3
    aim_tol: float = math.radians(2.0)
    line_tol: float = 0.1
    ratio_window: float = 1.0
    margin: float = 2.0
    empty_creep_throttle: float = 0.25
    empty_duration: float = 3.0
    brake_level: float = 0.5
    approach_throttle: float = 0.4
    approach_speed: float = 0.4
    init_throttle: float = 0.3
    expected_decel: float = 2.0
    steer_gain: float = 10.0
    aim_gain: float = 2.0
    heading_gain: float = 2.0
    max_heading_correction: float = math.radians(20.0)
    extra_lift_timeout: float = 30.0
    height_tol: float = 0.01
    tilt_tol: float = 0.01
    min_samples: int = 10

    def __post_init__(self):
        positive = [
            "h_empty", "v_safe", "aim_tol", "line_tol", "ratio_window", "margin", "empty_duration",
            "approach_speed", "expected_decel", "steer_gain", "aim_gain", "heading_gain",
            "max_heading_correction", "extra_lift_timeout", "height_tol", "tilt_tol",
        ]
        for name in positive:
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"Operator setting {name} must be positive, got {value}")
        fractions = ["empty_creep_throttle", "brake_level", "approach_throttle", "init_throttle"]
        for name in fractions:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"Operator setting {name} must lie in [0, 1], got {value}")
        if self.min_samples < 2:
            raise ValueError(f"min_samples must be at least 2, got {self.min_samples}")

    def to_dict(self) -> Dict[str, Any]:
        result = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "layout":
                value = value.to_dict()
            elif f.name == "machine":
                value = {m.name: getattr(value, m.name) for m in fields(value)}
            result[f.name] = value
        return result


@dataclass(frozen=True)
class OperatorState:
    """Everything the operator remembers between ticks"""
    config: OperatorConfig
    plan: VPathPlan
    phase: Phase = Phase.INIT
    estimator: EstimatorState = field(default_factory=EstimatorState)
    phase_entry_time: float = 0.0
    reversing_pose: Optional[Pose] = None
    aim_captured: bool = False
    receiver_passed: bool = False
    approach_aligned: bool = False
    odometer: float = 0.0
