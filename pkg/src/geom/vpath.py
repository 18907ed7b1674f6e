"""
V-Pattern Path Synthesis
========================

Closed-form construction of the theoretical short-loading-cycle path: a
straight line perpendicular to the bank, a circular arc of radius r_a
driven in reverse, a cusp at the reversing point, a circular arc of radius
r_b driven forward, and a straight line perpendicular to the load receiver.
Both arcs share the tangent at the cusp; its orientation is alpha.

Circle centres in the workplace frame:
    bank-side arc      C_a = (0, a + r_a)   tangent to z = a at the dig point
    receiver-side arc  C_b = (b + r_b, 0)   tangent to x = b at the dump point
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from .pose import Pose, GeometryDomainError

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi


# =============================================================================
# DATA MODELS
# =============================================================================

@dataclass(frozen=True)
class WorkplaceLayout:
    """Dig and dump point distances from the global origin"""
    a: float
    b: float
    receiver_halfwidth: float = 1.5

    def __post_init__(self):
        if not self.a > 0:
            raise GeometryDomainError(f"Layout distance a must be positive, got {self.a}")
        if not self.b > 0:
            raise GeometryDomainError(f"Layout distance b must be positive, got {self.b}")
        if not self.receiver_halfwidth >= 0:
            raise GeometryDomainError(
                f"receiver_halfwidth must be non-negative, got {self.receiver_halfwidth}"
            )

    @property
    def dig_point(self) -> Pose:
        """Reference pose at the bank, facing the bank"""
        return Pose(0.0, self.a, math.pi)

    @property
    def dump_point(self) -> Pose:
        """Reference pose at the receiver, facing the receiver"""
        return Pose(self.b, 0.0, -HALF_PI)

    def to_dict(self) -> Dict[str, float]:
        return {"a": self.a, "b": self.b, "receiver_halfwidth": self.receiver_halfwidth}


@dataclass(frozen=True)
class VPathPlan:
    """Arc radii and shared tangent orientation of a V-pattern"""
    r_a: float
    r_b: float
    alpha: float

    def __post_init__(self):
        if not (self.r_a > 0 and self.r_b > 0):
            raise GeometryDomainError(
                f"Arc radii must be positive, got r_a={self.r_a}, r_b={self.r_b}"
            )
        if not 0.0 < self.alpha < HALF_PI:
            raise GeometryDomainError(f"Tangent angle must lie in (0, pi/2), got {self.alpha}")

    def to_dict(self) -> Dict[str, float]:
        return {"r_a": self.r_a, "r_b": self.r_b, "alpha": self.alpha}


class TangencyResiduals(NamedTuple):
    line_arc_a: float
    arc_arc: float
    line_arc_b: float


# =============================================================================
# RADII
# =============================================================================

def _check_layout(a: float, b: float) -> None:
    if not (a > 0 and b > 0):
        raise GeometryDomainError(f"a and b must be positive, got a={a}, b={b}")


def radii_general(a: float, b: float, alpha: float) -> Tuple[float, float]:
    """
    Arc radii for an arbitrary shared tangent orientation.

    Raises:
        GeometryDomainError: alpha outside the open interval (0, pi/2)
    """
    _check_layout(a, b)
    if not 0.0 < alpha < HALF_PI:
        raise GeometryDomainError(f"alpha must lie in (0, pi/2), got {alpha}")

    sin_a = math.sin(alpha)
    cos_a = math.cos(alpha)
    r_a = 0.5 * ((a + b) * (1.0 + cos_a) / sin_a - (a - b))
    r_b = 0.5 * ((a + b) * cos_a / (1.0 - sin_a) + (a - b))
    return r_a, r_b


def radii_symmetric(a: float, b: float) -> Tuple[float, float]:
    """Arc radii for a 45 degree shared tangent"""
    _check_layout(a, b)
    sqrt2 = math.sqrt(2.0)
    r_a = (a + b) / sqrt2 + b
    r_b = (a - b * (1.0 - sqrt2)) / (2.0 - sqrt2)
    return r_a, r_b


def plan_aim_at_origin(a: float, b: float) -> VPathPlan:
    """
    Plan the V-pattern whose shared tangent passes through the global origin,
    so that the machine can reverse while aiming at a fixed point.
    """
    _check_layout(a, b)
    root = math.sqrt((a + b) ** 2 + 4.0 * a * b)
    r_a = b + ((a + b) * root - (a * a - b * b)) / (4.0 * a)
    r_b = a + ((a + b) * root + (a * a - b * b)) / (4.0 * b)

    cos_alpha = (a + r_a) / (r_a + r_b)
    if abs(cos_alpha) > 1.0:
        raise RuntimeError(
            f"Tangent orientation out of range (cos alpha = {cos_alpha}) for a={a}, b={b}"
        )
    plan = VPathPlan(r_a=r_a, r_b=r_b, alpha=math.acos(cos_alpha))
    logger.debug(f"Aim-at-origin plan for a={a}, b={b}: {plan}")
    return plan


# =============================================================================
# CONSTRUCTION AND VERIFICATION
# =============================================================================

def _centres(layout: WorkplaceLayout, plan: VPathPlan) -> Tuple[np.ndarray, np.ndarray]:
    c_a = np.array([0.0, layout.a + plan.r_a])
    c_b = np.array([layout.b + plan.r_b, 0.0])
    return c_a, c_b


def _centre_line(plan: VPathPlan) -> np.ndarray:
    """Unit vector from C_a towards C_b"""
    return np.array([math.sin(plan.alpha), -math.cos(plan.alpha)])


def tangency_residuals(layout: WorkplaceLayout, plan: VPathPlan) -> TangencyResiduals:
    """
    Gap at each tangency point of the constructed path.

    line_arc_a: arc b is anchored at the dump point, arc a is placed tangent
        to it along alpha; residual is the offset of arc a's contact with the
        bank-side line from the dig point.
    arc_arc: both arcs anchored at their lines; residual is the gap or overlap
        between the two circles.
    line_arc_b: mirror of line_arc_a, anchored at the dig point.
    """
    c_a, c_b = _centres(layout, plan)
    centre_line = _centre_line(plan)
    span = plan.r_a + plan.r_b

    placed_a = c_b - span * centre_line
    foot_a = placed_a - np.array([0.0, plan.r_a])
    line_arc_a = float(np.hypot(foot_a[0], foot_a[1] - layout.a))

    arc_arc = abs(float(np.linalg.norm(c_b - c_a)) - span)

    placed_b = c_a + span * centre_line
    foot_b = placed_b - np.array([plan.r_b, 0.0])
    line_arc_b = float(np.hypot(foot_b[0] - layout.b, foot_b[1]))

    return TangencyResiduals(line_arc_a, arc_arc, line_arc_b)


def cusp_point(layout: WorkplaceLayout, plan: VPathPlan) -> Tuple[float, float]:
    """Point where the two arcs touch (the theoretical reversing point)"""
    c_a, _ = _centres(layout, plan)
    cusp = c_a + plan.r_a * _centre_line(plan)
    return float(cusp[0]), float(cusp[1])


def tangent_origin_offset(layout: WorkplaceLayout, plan: VPathPlan) -> float:
    """Distance from the global origin to the shared tangent line"""
    jx, jz = cusp_point(layout, plan)
    return abs(jx * math.sin(plan.alpha) - jz * math.cos(plan.alpha))


def sample_vpath(layout: WorkplaceLayout, plan: VPathPlan, ds: float) -> List[Pose]:
    """
    Sample machine poses along the theoretical path, dig point to dump point.

    Headings are machine orientations: the reverse leg keeps the front
    towards the bank, so the orientation is continuous through the cusp,
    where it equals alpha + pi (front towards the origin along the tangent).
    Every arc is split into equal steps no longer than ds and the cusp is
    always sampled.
    The line segments at the bank and at the receiver have zero length, so
    only the two arcs contribute samples.

    Raises:
        ValueError: ds not positive
        GeometryDomainError: construction residual above 1e-6*(a+b)
    """
    if not ds > 0:
        raise ValueError(f"Sampling step must be positive, got {ds}")

    residuals = tangency_residuals(layout, plan)
    limit = 1e-6 * (layout.a + layout.b)
    if max(residuals) > limit:
        raise GeometryDomainError(f"Path construction failed, residuals {residuals}")

    c_a, c_b = _centres(layout, plan)
    poses: List[Pose] = []

    # Reverse leg: travel heading phi runs 0 -> alpha around C_a.
    length_a = plan.r_a * plan.alpha
    steps_a = max(1, math.ceil(length_a / ds))
    for phi in np.linspace(0.0, plan.alpha, steps_a + 1):
        poses.append(Pose(
            float(c_a[0] + plan.r_a * math.sin(phi)),
            float(c_a[1] - plan.r_a * math.cos(phi)),
            float(phi) + math.pi,
        ))

    # Forward leg: polar angle runs pi/2 + alpha -> pi around C_b.
    length_b = plan.r_b * (0.5 * math.pi - plan.alpha)
    steps_b = max(1, math.ceil(length_b / ds))
    for polar in np.linspace(0.5 * math.pi + plan.alpha, math.pi, steps_b + 1)[1:]:
        poses.append(Pose(
            float(c_b[0] + plan.r_b * math.cos(polar)),
            float(c_b[1] + plan.r_b * math.sin(polar)),
            float(polar) + 0.5 * math.pi,
        ))

    return poses
