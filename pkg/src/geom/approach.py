"""
Approach Path Estimation
========================

Remaining distance to the load receiver as a circular arc of radius r_c
followed by a straight segment perpendicular to the receiver.

Inputs are expressed relative to the final approach line:
    d      lateral offset between the machine and the approach line
    theta  heading measured from the receiver-parallel axis; pi/2 means
           driving straight at the receiver
    z      distance between the machine and the receiver line
"""

import math
from dataclasses import dataclass
from typing import Dict

from .pose import GeometryDomainError

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class ApproachSolution:
    """Arc-plus-line approach to the load receiver"""
    r_c: float
    L_c: float
    L_d: float
    L: float

    @property
    def straight_first(self) -> bool:
        """A negative straight segment means the arc would overshoot the receiver"""
        return self.L_d < 0.0

    def to_dict(self) -> Dict[str, float]:
        return {"r_c": self.r_c, "L_c": self.L_c, "L_d": self.L_d, "L": self.L}


def approach_solution(d: float, theta: float, z: float) -> ApproachSolution:
    """
    Solve the arc-plus-line approach.

    Args:
        d: Lateral offset from the approach line (m, >= 0)
        theta: Heading from the receiver-parallel axis (rad, in [0, pi/2))
        z: Distance from the receiver line (m, >= 0)

    Returns:
        ApproachSolution; L_d may be negative

    Raises:
        GeometryDomainError: theta >= pi/2, negative inputs, or d = 0 with theta > 0
    """
    if not 0.0 <= theta < HALF_PI:
        raise GeometryDomainError(f"Approach heading must lie in [0, pi/2), got {theta}")
    if d < 0.0 or z < 0.0:
        raise GeometryDomainError(f"Approach offsets must be non-negative, got d={d}, z={z}")
    if d == 0.0 and theta > 0.0:
        raise GeometryDomainError("No tangent circle exists for d = 0 with theta > 0")

    r_c = d / (1.0 - math.sin(theta))
    L_c = r_c * (HALF_PI - theta)
    L_d = z - r_c * math.cos(theta)
    return ApproachSolution(r_c=r_c, L_c=L_c, L_d=L_d, L=L_c + L_d)
