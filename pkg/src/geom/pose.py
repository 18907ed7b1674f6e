"""
Planar Pose and Bearing
=======================

Position and heading of the machine reference point in the workplace frame,
plus the bearing checks the operator uses to decide when it aims at the
global origin.

Frame: origin at the intersection of bank and load receiver, bank along the
z axis, receiver along the x axis, headings counterclockwise from +x.
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class GeometryDomainError(ValueError):
    """Raised when a geometric formula is evaluated outside its domain"""
    pass


def wrap_angle(angle: float) -> float:
    """Normalize an angle to (-pi, pi]"""
    if -math.pi < angle <= math.pi:
        return angle
    wrapped = math.remainder(angle, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


@dataclass(frozen=True)
class Pose:
    """Planar position (x, z) and heading theta"""
    x: float
    z: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def distance_to(self, x: float, z: float) -> float:
        return math.hypot(self.x - x, self.z - z)

    def advanced(self, distance: float, heading: float) -> "Pose":
        """Pose moved by distance along heading, orientation unchanged"""
        return Pose(
            self.x + distance * math.cos(heading),
            self.z + distance * math.sin(heading),
            self.theta,
        )

    def to_dict(self) -> Dict[str, float]:
        """Convert to dictionary"""
        return {"x": self.x, "z": self.z, "theta": self.theta}


def bearing_to_origin(pose: Pose) -> float:
    """
    Heading of the vector from the pose position to the global origin.

    Raises:
        GeometryDomainError: at the origin itself
    """
    if pose.x == 0.0 and pose.z == 0.0:
        raise GeometryDomainError("Bearing to origin is undefined at the origin")
    return wrap_angle(math.atan2(-pose.z, -pose.x))


def aims_at_origin(pose: Pose, reversing: bool, tol: float) -> bool:
    """
    Check whether the direction of travel points at the global origin.

    Args:
        pose: Machine pose
        reversing: True when the machine moves backwards (travel = theta + pi)
        tol: Angular tolerance in rad

    Returns:
        True if |bearing - travel direction| <= tol
    """
    if tol <= 0:
        raise ValueError(f"Aim tolerance must be positive, got {tol}")
    if pose.x == 0.0 and pose.z == 0.0:
        return False
    travel = wrap_angle(pose.theta + math.pi) if reversing else pose.theta
    return abs(wrap_angle(bearing_to_origin(pose) - travel)) <= tol
