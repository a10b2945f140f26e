"""Placement and rotation planning for passive metal reflectors."""

__version__ = "0.1.0"

from .geometry import Point, ReflectorDims, ReflectorPose, TargetArea  # noqa: E402
from .link_budget import LinkBudgetConfig, receive_power  # noqa: E402

__all__ = [
    "Point",
    "ReflectorDims",
    "ReflectorPose",
    "TargetArea",
    "LinkBudgetConfig",
    "receive_power",
]
