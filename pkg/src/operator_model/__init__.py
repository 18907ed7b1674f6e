"""
Operator model: event-driven phase machine driving the loader through a
short loading cycle from feedback signals only.
"""

from .estimator import (
    EstimatorState, estimate_height_at_arrival, estimator_update, windowed_slope,
)
from .state import (
    ALLOWED_TRANSITIONS, MachineKnowledge, OperatorConfig,
    OperatorState, Phase, PhaseTimeoutError, is_monotone,
)
from .rules import (
    PHASE_DIRECTION, approach_articulation, approach_coordinates, operator_init,
    operator_tick, predicted_reversing_pose, reversal_verdict, solve_approach,
)

__all__ = [
    "EstimatorState",
    "estimate_height_at_arrival",
    "estimator_update",
    "windowed_slope",
    "ALLOWED_TRANSITIONS",
    "MachineKnowledge",
    "OperatorConfig",
    "OperatorState",
    "Phase",
    "PhaseTimeoutError",
    "is_monotone",
    "PHASE_DIRECTION",
    "approach_articulation",
    "approach_coordinates",
    "operator_init",
    "operator_tick",
    "predicted_reversing_pose",
    "reversal_verdict",
    "solve_approach",
]
