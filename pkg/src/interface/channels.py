"""
Operator/Machine Channels
=========================

The only values that cross between the operator model and the machine
model. Both sides are black boxes to each other: the operator sends
ControlSignals, the machine answers with a FeedbackFrame.
"""

import logging
from dataclasses import dataclass, fields
from enum import Enum
from typing import Dict, Any

from ..geom.pose import Pose

logger = logging.getLogger(__name__)


class Direction(Enum):
    """Transmission direction selector"""
    FORWARD = "forward"
    REVERSE = "reverse"
    NEUTRAL = "neutral"

    @property
    def sign(self) -> int:
        return _DIRECTION_SIGN[self]


_DIRECTION_SIGN = {Direction.FORWARD: 1, Direction.REVERSE: -1, Direction.NEUTRAL: 0}

# (lower, upper) bounds of each control channel
CONTROL_BOUNDS = {
    "throttle": (0.0, 1.0),
    "brake": (0.0, 1.0),
    "steering": (-1.0, 1.0),
    "lift": (-1.0, 1.0),
    "tilt": (-1.0, 1.0),
}


@dataclass(frozen=True)
class ControlSignals:
    """Operator commands sent through the machine controls"""
    throttle: float = 0.0
    brake: float = 0.0
    steering: float = 0.0
    lift: float = 0.0
    tilt: float = 0.0
    direction: Direction = Direction.NEUTRAL

    def __post_init__(self):
        for name, (lower, upper) in CONTROL_BOUNDS.items():
            value = getattr(self, name)
            if not lower <= value <= upper:
                raise ValueError(f"Control {name}={value} outside [{lower}, {upper}]")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "throttle": self.throttle,
            "brake": self.brake,
            "steering": self.steering,
            "lift": self.lift,
            "tilt": self.tilt,
            "direction": self.direction.value,
        }


@dataclass(frozen=True)
class FeedbackFrame:
    """What the operator perceives of the machine"""
    pose: Pose
    v: float
    engine: float
    h: float
    phi: float
    gamma: float
    direction: Direction

    @staticmethod
    def channel_names() -> tuple:
        return tuple(f.name for f in fields(FeedbackFrame))

    def to_dict(self) -> Dict[str, Any]:
        return {
            **self.pose.to_dict(),
            "v": self.v,
            "engine": self.engine,
            "h": self.h,
            "phi": self.phi,
            "gamma": self.gamma,
            "direction": self.direction.value,
        }
