"""
Articulated Steering Kinematics
===============================

Relation between articulation angle and turning radius of the rear-frame
reference point of an articulated loader with axle distances l_f (front)
and l_r (rear) from the hinge:

    R = (l_f + l_r * cos(gamma)) / |sin(gamma)|
"""

import math

from ..geom.pose import Pose


class InfeasibleRadiusError(ValueError):
    """Requested turning radius is tighter than the machine can steer"""

    def __init__(self, radius: float, minimum: float):
        self.radius = radius
        self.minimum = minimum
        super().__init__(
            f"Turning radius {radius:.3f} m is below the machine minimum {minimum:.3f} m"
        )


def turning_radius(gamma: float, l_f: float, l_r: float) -> float:
    """Turning radius for an articulation angle; inf when driving straight"""
    if gamma == 0.0:
        return math.inf
    return (l_f + l_r * math.cos(gamma)) / abs(math.sin(gamma))


def minimum_turning_radius(gamma_max: float, l_f: float, l_r: float) -> float:
    return turning_radius(gamma_max, l_f, l_r)


def articulation_for_radius(radius: float, l_f: float, l_r: float, gamma_max: float) -> float:
    """
    Non-negative articulation angle that yields the requested radius.

    Inverts R*sin(g) - l_r*cos(g) = l_f on the monotone branch.

    Raises:
        InfeasibleRadiusError: radius below turning_radius(gamma_max)
    """
    if math.isinf(radius):
        return 0.0
    minimum = minimum_turning_radius(gamma_max, l_f, l_r)
    if not radius >= minimum:
        raise InfeasibleRadiusError(radius, minimum)

    hypot = math.hypot(radius, l_r)
    gamma = math.atan2(l_r, radius) + math.asin(l_f / hypot)
    return min(gamma, gamma_max)


def yaw_rate(v: float, gamma: float, l_f: float, l_r: float) -> float:
    """Rear-frame yaw rate, v/R signed by gamma and direction of travel"""
    return v * math.sin(gamma) / (l_f + l_r * math.cos(gamma))


def advance_pose(pose: Pose, v: float, gamma: float, dt: float, l_f: float, l_r: float) -> Pose:
    """Explicit Euler step of the planar pose"""
    return Pose(
        pose.x + v * math.cos(pose.theta) * dt,
        pose.z + v * math.sin(pose.theta) * dt,
        pose.theta + yaw_rate(v, gamma, l_f, l_r) * dt,
    )
