"""
Articulated Wheel Loader Plant
==============================

Deterministic kinematic stand-in for a wheel loader: planar articulated
steering, rate-limited lift/tilt/articulation actuators, first-order engine
speed and a torque-converter reversal lag. Traction is ideal and there is
no load or terrain model.

State is integrated with explicit fixed-step Euler.
"""

import math
import logging
from dataclasses import dataclass, fields, replace
from typing import Dict, List, Tuple, Any

from ..geom.pose import Pose
from ..interface.channels import ControlSignals, Direction, FeedbackFrame
from .base_plant import BasePlant, PlantRegistry
from .kinematics import advance_pose, minimum_turning_radius

logger = logging.getLogger(__name__)


class LimitViolationError(ValueError):
    """Machine parameter or initial state outside its limits"""
    pass


# =============================================================================
# DATA MODELS
# =============================================================================

@dataclass(frozen=True)
class MachineParams:
    """Geometry, rates and limits of the loader"""
    l_f: float = 1.5
    l_r: float = 1.5
    gamma_max: float = math.radians(35.0)
    gamma_rate: float = math.radians(20.0)
    v_max_fwd: float = 3.0
    v_max_rev: float = 3.0
    accel_gain: float = 2.0
    brake_decel: float = 3.0
    coast_decel: float = 0.5
    lift_rate_max: float = 0.25
    tilt_rate_max: float = 0.6
    lift_scale: float = 1.0
    h_max: float = 4.0
    tilt_min: float = math.radians(-45.0)
    tilt_max: float = math.radians(50.0)
    engine_idle: float = 800.0
    engine_max: float = 2100.0
    engine_tau: float = 0.5
    reversal_tau: float = 0.8

    def __post_init__(self):
        for problem in self.violations():
            raise LimitViolationError(problem)

    def violations(self) -> List[str]:
        """Human readable list of violated parameter invariants"""
        problems = []
        positive = [
            "l_f", "l_r", "gamma_rate", "v_max_fwd", "v_max_rev", "accel_gain",
            "brake_decel", "coast_decel", "lift_rate_max", "tilt_rate_max",
            "lift_scale", "h_max", "engine_idle", "engine_max", "engine_tau", "reversal_tau",
        ]
        for name in positive:
            value = getattr(self, name)
            if not value > 0:
                problems.append(f"{name} must be positive, got {value}")
        low, high = math.radians(30.0), math.radians(45.0)
        if not low - 1e-12 <= self.gamma_max <= high + 1e-12:
            problems.append(f"gamma_max must lie in [30, 45] deg, got {math.degrees(self.gamma_max):.3f} deg")
        if not self.tilt_min < self.tilt_max:
            problems.append(f"tilt_min ({self.tilt_min}) must be below tilt_max ({self.tilt_max})")
        if not self.engine_idle < self.engine_max:
            problems.append(f"engine_idle ({self.engine_idle}) must be below engine_max ({self.engine_max})")
        return problems

    @property
    def min_turning_radius(self) -> float:
        return minimum_turning_radius(self.gamma_max, self.l_f, self.l_r)

    def to_dict(self) -> Dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class MachineState:
    """Full plant state; never crosses the operator boundary"""
    pose: Pose
    v: float = 0.0
    gamma: float = 0.0
    h: float = 0.0
    phi: float = 0.0
    engine: float = 800.0
    direction: Direction = Direction.NEUTRAL
    converter_lock: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            **self.pose.to_dict(),
            "v": self.v,
            "gamma": self.gamma,
            "h": self.h,
            "phi": self.phi,
            "engine": self.engine,
            "direction": self.direction.value,
            "converter_lock": self.converter_lock,
        }


# =============================================================================
# STATE TRANSITIONS
# =============================================================================

def _clip(value: float, lower: float, upper: float) -> float:
    return min(max(value, lower), upper)


def plant_init(params: MachineParams, pose: Pose, h0: float, phi0: float) -> MachineState:
    """
    Machine at rest at the given pose with the bucket at (h0, phi0).

    Raises:
        LimitViolationError: h0 or phi0 outside the actuator ranges
    """
    if not 0.0 <= h0 <= params.h_max:
        raise LimitViolationError(f"h0={h0} outside [0, {params.h_max}]")
    if not params.tilt_min <= phi0 <= params.tilt_max:
        raise LimitViolationError(f"phi0={phi0} outside [{params.tilt_min}, {params.tilt_max}]")
    return MachineState(
        pose=pose,
        v=0.0,
        gamma=0.0,
        h=h0,
        phi=phi0,
        engine=params.engine_idle,
        direction=Direction.NEUTRAL,
        converter_lock=0.0,
    )


def _longitudinal(state: MachineState, u: ControlSignals, dt: float,
                  params: MachineParams) -> Tuple[float, float]:
    """New speed and converter lock"""
    lock = max(0.0, state.converter_lock - dt)
    v = state.v
    if u.direction is not state.direction and v != 0.0 and u.direction.sign * v < 0:
        lock = params.reversal_tau
        logger.debug(f"Direction change to {u.direction.value} at v={v:.3f}, converter locked")

    drive = params.accel_gain * u.throttle * u.direction.sign
    resist = params.brake_decel * u.brake + params.coast_decel

    if v > 0.0:
        v_new = v + (drive - resist) * dt
        if v_new < 0.0:
            v_new = 0.0
    elif v < 0.0:
        v_new = v + (drive + resist) * dt
        if v_new > 0.0:
            v_new = 0.0
    elif lock > 0.0 or abs(drive) <= resist:
        v_new = 0.0
    else:
        v_new = drive * dt

    return _clip(v_new, -params.v_max_rev, params.v_max_fwd), lock


def plant_step(state: MachineState, u: ControlSignals, dt: float,
               params: MachineParams) -> MachineState:
    """
    Advance the machine by dt.

    Update order: engine, direction/reversal lag, speed, articulation,
    pose, bucket actuators. Every quantity saturates at its limits.
    """
    if not dt > 0:
        raise ValueError(f"Time step must be positive, got {dt}")

    target_engine = params.engine_idle + u.throttle * (params.engine_max - params.engine_idle)
    engine = state.engine + (target_engine - state.engine) * min(1.0, dt / params.engine_tau)
    engine = _clip(engine, params.engine_idle, params.engine_max)

    v, lock = _longitudinal(state, u, dt, params)

    gamma = _clip(state.gamma + u.steering * params.gamma_rate * dt,
                  -params.gamma_max, params.gamma_max)

    pose = state.pose
    if v != 0.0:
        pose = advance_pose(pose, v, gamma, dt, params.l_f, params.l_r)

    h = _clip(state.h + u.lift * params.lift_rate_max * params.lift_scale * dt, 0.0, params.h_max)
    phi = _clip(state.phi + u.tilt * params.tilt_rate_max * dt, params.tilt_min, params.tilt_max)

    return MachineState(
        pose=pose,
        v=v,
        gamma=gamma,
        h=h,
        phi=phi,
        engine=engine,
        direction=u.direction,
        converter_lock=lock,
    )


def observe(state: MachineState) -> FeedbackFrame:
    """Project the machine state onto the feedback channels"""
    return FeedbackFrame(
        pose=state.pose,
        v=state.v,
        engine=state.engine,
        h=state.h,
        phi=state.phi,
        gamma=state.gamma,
        direction=state.direction,
    )


def state_violations(state: MachineState, params: MachineParams) -> List[str]:
    """Invariants of MachineState that do not hold"""
    problems = []
    if not abs(state.gamma) <= params.gamma_max:
        problems.append(f"gamma={state.gamma}")
    if not 0.0 <= state.h <= params.h_max:
        problems.append(f"h={state.h}")
    if not params.tilt_min <= state.phi <= params.tilt_max:
        problems.append(f"phi={state.phi}")
    if not params.engine_idle <= state.engine <= params.engine_max:
        problems.append(f"engine={state.engine}")
    if not -params.v_max_rev <= state.v <= params.v_max_fwd:
        problems.append(f"v={state.v}")
    if not -math.pi < state.pose.theta <= math.pi:
        problems.append(f"theta={state.pose.theta}")
    return problems


# =============================================================================
# PLANT IMPLEMENTATION
# =============================================================================

@PlantRegistry.register("articulated")
class ArticulatedLoaderPlant(BasePlant):
    """Kinematic articulated loader"""

    def __init__(self, params: MachineParams = None):
        super().__init__(params or MachineParams())

    def initial_state(self, pose: Pose, h0: float, phi0: float) -> MachineState:
        return plant_init(self.params, pose, h0, phi0)

    def step(self, state: MachineState, u: ControlSignals, dt: float) -> MachineState:
        return plant_step(state, u, dt, self.params)

    def observe(self, state: MachineState) -> FeedbackFrame:
        return observe(state)

    def with_params(self, **overrides: float) -> "ArticulatedLoaderPlant":
        """Same model with some parameters replaced"""
        return ArticulatedLoaderPlant(replace(self.params, **overrides))
