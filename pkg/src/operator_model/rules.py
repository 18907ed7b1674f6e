"""
Operator Phase Rules
====================

Event-driven operator for the short loading cycle. Each phase owns a rule
that checks its exit condition and a control law that produces the
machine commands. A tick runs the current phase's rule; a rule makes at
most one transition, and the commands of the phase it ends in are emitted.

The operator sees only FeedbackFrames. Steering geometry comes from
MachineKnowledge, never from the machine model itself.
"""

import math
import logging
from dataclasses import replace
from typing import Callable, Dict, Optional, Tuple

from ..geom.approach import ApproachSolution, approach_solution
from ..geom.pose import (
    GeometryDomainError, Pose, aims_at_origin, bearing_to_origin, wrap_angle,
)
from ..geom.vpath import WorkplaceLayout, plan_aim_at_origin
from ..interface.channels import ControlSignals, Direction, FeedbackFrame
from ..plant.kinematics import (
    InfeasibleRadiusError, articulation_for_radius, minimum_turning_radius,
)
from .estimator import EstimatorState, estimate_height_at_arrival, estimator_update
from .state import (
    ALLOWED_TRANSITIONS, OperatorConfig, OperatorState, Phase, PhaseTimeoutError,
)

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi

Rule = Callable[[OperatorState, FeedbackFrame, float], Tuple[OperatorState, ControlSignals]]
ControlLaw = Callable[[OperatorState, FeedbackFrame], ControlSignals]

PHASE_DIRECTION: Dict[Phase, Direction] = {
    Phase.INIT: Direction.NEUTRAL,
    Phase.TILT_BACK: Direction.FORWARD,
    Phase.LEAVING_BANK: Direction.REVERSE,
    Phase.TURN_LIMITED: Direction.REVERSE,
    Phase.RETARDATION: Direction.REVERSE,
    Phase.REVERSING: Direction.FORWARD,
    Phase.TOWARD_RECEIVER: Direction.FORWARD,
    Phase.EXTRA_LIFT: Direction.FORWARD,
    Phase.EMPTYING: Direction.FORWARD,
    Phase.DONE: Direction.NEUTRAL,
}


# =============================================================================
# HELPERS
# =============================================================================

def _clip(value: float, lower: float, upper: float) -> float:
    return min(max(value, lower), upper)


def _bang_bang(value: float, target: float, tol: float) -> float:
    """On/off actuation towards a target"""
    if value < target - tol:
        return 1.0
    if value > target + tol:
        return -1.0
    return 0.0


def _steer_toward(config: OperatorConfig, fb: FeedbackFrame, gamma_target: float) -> float:
    gamma_max = config.machine.gamma_max
    target = _clip(gamma_target, -gamma_max, gamma_max)
    return _clip(config.steer_gain * (target - fb.gamma), -1.0, 1.0)


def _min_radius(config: OperatorConfig) -> float:
    m = config.machine
    return minimum_turning_radius(m.gamma_max, m.l_f, m.l_r)


def _articulation(config: OperatorConfig, radius: float) -> Optional[float]:
    m = config.machine
    try:
        return articulation_for_radius(radius, m.l_f, m.l_r, m.gamma_max)
    except InfeasibleRadiusError:
        return None


def _lift_until_empty_height(config: OperatorConfig, fb: FeedbackFrame) -> float:
    return 1.0 if fb.h < config.h_empty else 0.0


def approach_coordinates(layout: WorkplaceLayout, pose: Pose) -> Tuple[float, float, float]:
    """
    Pose relative to the final approach line x = b.

    Returns:
        (d, z, theta): lateral offset, distance to the receiver line and
        heading from the receiver-parallel axis (pi/2 = facing the receiver)
    """
    return pose.x - layout.b, pose.z, wrap_angle(pose.theta - math.pi)


def solve_approach(config: OperatorConfig, pose: Pose) -> Optional[ApproachSolution]:
    """Arc-plus-line approach from pose, or None where no such path exists"""
    d, z, theta = approach_coordinates(config.layout, pose)
    if d <= 0.0 or z < 0.0 or theta >= HALF_PI:
        return None
    try:
        return approach_solution(d, max(theta, 0.0), z)
    except GeometryDomainError:
        return None


def predicted_reversing_pose(config: OperatorConfig, fb: FeedbackFrame) -> Tuple[Pose, float]:
    """Pose after braking to a stop along the current travel direction, and the stopping distance"""
    stop = fb.v * fb.v / (2.0 * config.expected_decel)
    travel = fb.pose.theta if fb.v >= 0.0 else fb.pose.theta + math.pi
    return fb.pose.advanced(stop, travel), stop


def _switch(state: OperatorState, phase: Phase, fb: FeedbackFrame,
            t: float) -> Tuple[OperatorState, ControlSignals]:
    if phase not in ALLOWED_TRANSITIONS[state.phase]:
        raise RuntimeError(f"Illegal phase transition {state.phase.label} -> {phase.label}")
    logger.info(f"Phase {state.phase.label} -> {phase.label} at t={t:.2f}s")
    new_state = replace(state, phase=phase, phase_entry_time=t)
    return new_state, PHASE_CONTROLS[phase](new_state, fb)


# =============================================================================
# STEERING TARGETS
# =============================================================================

def bearing_line_offset(pose: Pose) -> float:
    """Distance from the origin to the line through the pose along its heading"""
    return abs(pose.x * math.sin(pose.theta) - pose.z * math.cos(pose.theta))


def _bearing_error(pose: Pose) -> float:
    if pose.x == 0.0 and pose.z == 0.0:
        return 0.0
    return wrap_angle(bearing_to_origin(pose) - pose.theta)


def _on_bearing_line(state: OperatorState, fb: FeedbackFrame) -> bool:
    """Aim captured, machine on the line through the origin and steering straight"""
    config = state.config
    return (state.aim_captured
            and bearing_line_offset(fb.pose) <= config.line_tol
            and abs(fb.gamma) <= config.aim_tol)


def _bearing_hold(config: OperatorConfig, pose: Pose) -> float:
    """Articulation that keeps the machine on the line through the origin while reversing"""
    if bearing_line_offset(pose) <= 0.5 * config.line_tol:
        return 0.0
    return -config.aim_gain * _bearing_error(pose)


def _dump_point_hold(config: OperatorConfig, pose: Pose) -> float:
    """Articulation that steers a forward-driving machine at the dump point"""
    layout = config.layout
    aim = math.atan2(-pose.z, layout.b - pose.x)
    deviation = _clip(wrap_angle(aim + HALF_PI),
                      -config.max_heading_correction, config.max_heading_correction)
    error = wrap_angle(-HALF_PI + deviation - pose.theta)
    return config.heading_gain * error


def approach_articulation(state: OperatorState, pose: Pose) -> float:
    """
    Target articulation while driving forward to the receiver.

    Close to the receiver the bucket is squared to it; once aligned the
    machine drives at the dump point; before that it follows the arc of
    radius r_c, or goes straight while the arc would overshoot.
    """
    config = state.config
    gamma_max = config.machine.gamma_max
    d, z, theta = approach_coordinates(config.layout, pose)

    if z <= 2.0 * config.margin:
        return wrap_angle(-HALF_PI - pose.theta)
    if state.approach_aligned or theta >= HALF_PI - config.aim_tol:
        return _dump_point_hold(config, pose)
    if d <= 0.0:
        return gamma_max

    solution = solve_approach(config, pose)
    if solution is None:
        return gamma_max
    if solution.L_d < 0.0:
        return 0.0
    gamma = _articulation(config, solution.r_c)
    return gamma_max if gamma is None else gamma


# =============================================================================
# CONTROL LAWS
# =============================================================================

def _init_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    config = state.config
    return ControlSignals(
        throttle=config.init_throttle,
        brake=1.0,
        steering=_steer_toward(config, fb, 0.0),
        lift=_bang_bang(fb.h, config.h_init, config.height_tol),
        tilt=_bang_bang(fb.phi, config.phi_init, config.tilt_tol),
        direction=Direction.NEUTRAL,
    )


def _tilt_back_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    return ControlSignals(brake=1.0, tilt=1.0, direction=Direction.FORWARD)


def _leaving_bank_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    config = state.config
    if state.aim_captured:
        gamma_target = _bearing_hold(config, fb.pose)
    else:
        gamma = _articulation(config, state.plan.r_a)
        gamma_target = -(config.machine.gamma_max if gamma is None else gamma)
    return ControlSignals(
        throttle=1.0,
        steering=_steer_toward(config, fb, gamma_target),
        lift=_lift_until_empty_height(config, fb),
        direction=Direction.REVERSE,
    )


def _retardation_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    config = state.config
    gamma_target = _bearing_hold(config, fb.pose) if state.aim_captured else 0.0
    return ControlSignals(
        brake=config.brake_level,
        steering=_steer_toward(config, fb, gamma_target),
        lift=_lift_until_empty_height(config, fb),
        direction=Direction.REVERSE,
    )


def _reversing_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    # Articulate towards the coming turn while the converter reverses.
    return ControlSignals(
        throttle=1.0,
        steering=_steer_toward(state.config, fb, approach_articulation(state, fb.pose)),
        direction=Direction.FORWARD,
    )


def _toward_receiver_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    config = state.config
    throttle, brake = 1.0, 0.0
    if fb.pose.z <= 2.0 * config.margin:
        if fb.v > config.approach_speed:
            throttle, brake = 0.0, 1.0
        else:
            throttle = config.approach_throttle
    return ControlSignals(
        throttle=throttle,
        brake=brake,
        steering=_steer_toward(config, fb, approach_articulation(state, fb.pose)),
        lift=_lift_until_empty_height(config, fb),
        direction=Direction.FORWARD,
    )


def _extra_lift_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    return ControlSignals(brake=1.0, lift=1.0, direction=Direction.FORWARD)


def _emptying_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    config = state.config
    tilted = fb.phi <= config.machine.tilt_min + config.tilt_tol
    return ControlSignals(
        throttle=config.empty_creep_throttle,
        lift=0.3,
        tilt=0.0 if tilted else -1.0,
        direction=Direction.FORWARD,
    )


def _done_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    return ControlSignals()


def _hold_controls(state: OperatorState, fb: FeedbackFrame) -> ControlSignals:
    """Fail-safe: stop and keep everything where it is"""
    return ControlSignals(brake=1.0, direction=PHASE_DIRECTION[state.phase])


PHASE_CONTROLS: Dict[Phase, ControlLaw] = {
    Phase.INIT: _init_controls,
    Phase.TILT_BACK: _tilt_back_controls,
    Phase.LEAVING_BANK: _leaving_bank_controls,
    Phase.TURN_LIMITED: _leaving_bank_controls,
    Phase.RETARDATION: _retardation_controls,
    Phase.REVERSING: _reversing_controls,
    Phase.TOWARD_RECEIVER: _toward_receiver_controls,
    Phase.EXTRA_LIFT: _extra_lift_controls,
    Phase.EMPTYING: _emptying_controls,
    Phase.DONE: _done_controls,
}


# =============================================================================
# PHASE RULES
# =============================================================================

def init_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    config = state.config
    if (abs(fb.h - config.h_init) <= config.height_tol
            and abs(fb.phi - config.phi_init) <= config.tilt_tol):
        return _switch(state, Phase.TILT_BACK, fb, t)
    return state, _init_controls(state, fb)


def phase_1a_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    """Tilt the bucket back as far as it goes"""
    config = state.config
    if fb.phi >= config.machine.tilt_max - config.tilt_tol:
        return _switch(state, Phase.LEAVING_BANK, fb, t)
    return state, _tilt_back_controls(state, fb)


def _leaving_bank_bookkeeping(state: OperatorState, fb: FeedbackFrame, t: float) -> OperatorState:
    config = state.config
    updates = {}
    aimed = (aims_at_origin(fb.pose, reversing=False, tol=config.aim_tol)
             or -HALF_PI < _bearing_error(fb.pose) < 0.0)
    if not state.aim_captured and aimed:
        # The front faces the origin, or has swung past it, while the machine backs away.
        logger.info(f"Aiming at origin from ({fb.pose.x:.2f}, {fb.pose.z:.2f}) at t={t:.2f}s")
        updates["aim_captured"] = True
    receiver_passed = state.receiver_passed or fb.pose.x >= config.layout.b
    if receiver_passed and not state.receiver_passed:
        logger.info(f"Load receiver passed at t={t:.2f}s, h={fb.h:.3f}m")
        updates["receiver_passed"] = True
    if receiver_passed:
        updates["estimator"] = estimator_update(
            state.estimator, t, state.odometer, fb.h, lifting=fb.h < config.h_empty
        )
    return replace(state, **updates) if updates else state


def reversal_verdict(state: OperatorState, fb: FeedbackFrame) -> Optional[Phase]:
    """
    Decide whether reversing may begin now.

    Returns:
        Phase.RETARDATION when the predicted arrival height suffices and the
        approach turn is drivable, Phase.TURN_LIMITED when it suffices but
        the turn is too tight, None otherwise
    """
    config = state.config
    pose, stop = predicted_reversing_pose(config, fb)
    solution = solve_approach(config, pose)
    if solution is None:
        return None
    h_pred = estimate_height_at_arrival(state.estimator, fb.h, stop + solution.L)
    if h_pred < config.h_empty:
        return None
    logger.debug(f"Predicted arrival height {h_pred:.3f}m, r_c={solution.r_c:.2f}m")
    if solution.r_c >= _min_radius(config):
        return Phase.RETARDATION
    return Phase.TURN_LIMITED


def phase_2_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    """Reverse away from the bank, lifting, until the reversing point is reached"""
    state = _leaving_bank_bookkeeping(state, fb, t)
    if state.receiver_passed:
        verdict = reversal_verdict(state, fb)
        # Retardation waits until the machine is settled on the line through the origin.
        settled = _on_bearing_line(state, fb)
        if verdict is Phase.TURN_LIMITED or (verdict is Phase.RETARDATION and settled):
            return _switch(state, verdict, fb, t)
    return state, _leaving_bank_controls(state, fb)


def phase_2a_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    """Continue the V-pattern until the approach turn is drivable from the bearing line"""
    state = _leaving_bank_bookkeeping(state, fb, t)
    pose, _ = predicted_reversing_pose(state.config, fb)
    solution = solve_approach(state.config, pose)
    drivable = solution is not None and solution.r_c >= _min_radius(state.config)
    if drivable and _on_bearing_line(state, fb):
        return _switch(state, Phase.RETARDATION, fb, t)
    return state, _leaving_bank_controls(state, fb)


def phase_3_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    if abs(fb.v) <= state.config.v_safe:
        state = replace(state, reversing_pose=fb.pose)
        return _switch(state, Phase.REVERSING, fb, t)
    return state, _retardation_controls(state, fb)


def phase_4_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    if fb.v > 0.0:
        return _switch(state, Phase.TOWARD_RECEIVER, fb, t)
    return state, _reversing_controls(state, fb)


def phase_5_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    config = state.config
    d, z, theta = approach_coordinates(config.layout, fb.pose)
    if not state.approach_aligned and theta >= HALF_PI - config.aim_tol:
        logger.info(f"Aligned with the receiver approach at t={t:.2f}s, offset {d:.2f}m")
        state = replace(state, approach_aligned=True)

    if z <= config.margin:
        if abs(d) > config.layout.receiver_halfwidth:
            logger.warning(f"Arrived {d:.2f}m beside the dump point")
        target = Phase.EMPTYING if fb.h >= config.h_empty else Phase.EXTRA_LIFT
        return _switch(state, target, fb, t)
    return state, _toward_receiver_controls(state, fb)


def phase_5a_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    """
    Stand at the receiver and lift until the bucket clears it.

    Raises:
        PhaseTimeoutError: emptying height not reached within extra_lift_timeout
    """
    config = state.config
    if fb.h >= config.h_empty:
        return _switch(state, Phase.EMPTYING, fb, t)
    if t - state.phase_entry_time > config.extra_lift_timeout:
        raise PhaseTimeoutError(
            f"Bucket height {fb.h:.3f}m still below {config.h_empty}m after "
            f"{config.extra_lift_timeout}s of extra lift"
        )
    return state, _extra_lift_controls(state, fb)


def phase_6_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    config = state.config
    tilted = fb.phi <= config.machine.tilt_min + config.tilt_tol
    if tilted and t - state.phase_entry_time >= config.empty_duration:
        return _switch(state, Phase.DONE, fb, t)
    return state, _emptying_controls(state, fb)


def done_rule(state: OperatorState, fb: FeedbackFrame, t: float) -> Tuple[OperatorState, ControlSignals]:
    return state, _done_controls(state, fb)


PHASE_RULES: Dict[Phase, Rule] = {
    Phase.INIT: init_rule,
    Phase.TILT_BACK: phase_1a_rule,
    Phase.LEAVING_BANK: phase_2_rule,
    Phase.TURN_LIMITED: phase_2a_rule,
    Phase.RETARDATION: phase_3_rule,
    Phase.REVERSING: phase_4_rule,
    Phase.TOWARD_RECEIVER: phase_5_rule,
    Phase.EXTRA_LIFT: phase_5a_rule,
    Phase.EMPTYING: phase_6_rule,
    Phase.DONE: done_rule,
}


# =============================================================================
# PUBLIC API
# =============================================================================

def operator_init(config: OperatorConfig) -> OperatorState:
    """Fresh operator at the bank with its V-pattern planned"""
    plan = plan_aim_at_origin(config.layout.a, config.layout.b)
    logger.info(
        f"Planned V-pattern r_a={plan.r_a:.2f}m r_b={plan.r_b:.2f}m "
        f"alpha={math.degrees(plan.alpha):.1f}deg"
    )
    return OperatorState(
        config=config,
        plan=plan,
        estimator=EstimatorState(window=config.ratio_window, min_samples=config.min_samples),
    )


def operator_tick(state: OperatorState, fb: FeedbackFrame, t: float,
                  dt: float) -> Tuple[OperatorState, ControlSignals]:
    """
    One decision step of the operator.

    Args:
        state: Operator state from the previous tick
        fb: Machine feedback at time t
        t: Current time
        dt: Time until the next tick

    Returns:
        (next operator state, commands applied over [t, t + dt))

    Raises:
        PhaseTimeoutError: propagated from the extra-lift phase
    """
    try:
        new_state, signals = PHASE_RULES[state.phase](state, fb, t)
    except GeometryDomainError as e:
        logger.warning(f"Holding phase {state.phase.label}: {e}")
        new_state, signals = state, _hold_controls(state, fb)
    return replace(new_state, odometer=state.odometer + abs(fb.v) * dt), signals
