"""Geometry Module"""
from .pose import Pose, GeometryDomainError, wrap_angle, bearing_to_origin, aims_at_origin
from .vpath import (
    WorkplaceLayout, VPathPlan, TangencyResiduals,
    radii_general, radii_symmetric, plan_aim_at_origin,
    sample_vpath, tangency_residuals, tangent_origin_offset,
)
from .approach import ApproachSolution, approach_solution

__all__ = [
    "Pose", "GeometryDomainError", "wrap_angle", "bearing_to_origin", "aims_at_origin",
    "WorkplaceLayout", "VPathPlan", "TangencyResiduals",
    "radii_general", "radii_symmetric", "plan_aim_at_origin",
    "sample_vpath", "tangency_residuals", "tangent_origin_offset",
    "ApproachSolution", "approach_solution",
]
