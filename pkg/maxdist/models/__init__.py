"""
Geometry value types and tag constants
"""

from maxdist.models.geometry import CurveGraph, Point, PointCloud
from maxdist.models.tags import BoundMethod, MoveKind, TargetMode

__all__ = ["Point", "PointCloud", "CurveGraph", "BoundMethod", "MoveKind", "TargetMode"]
