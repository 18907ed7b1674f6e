"""Machine Plant Module"""
from .base_plant import BasePlant, PlantRegistry, PlantRegistryError
from .kinematics import (
    InfeasibleRadiusError, turning_radius, minimum_turning_radius,
    articulation_for_radius, yaw_rate, advance_pose,
)
from .articulated_loader import (
    LimitViolationError, MachineParams, MachineState, ArticulatedLoaderPlant,
    plant_init, plant_step, observe, state_violations,
)

__all__ = [
    "BasePlant", "PlantRegistry", "PlantRegistryError",
    "InfeasibleRadiusError", "turning_radius", "minimum_turning_radius",
    "articulation_for_radius", "yaw_rate", "advance_pose",
    "LimitViolationError", "MachineParams", "MachineState", "ArticulatedLoaderPlant",
    "plant_init", "plant_step", "observe", "state_violations",
]
