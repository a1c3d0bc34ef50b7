"""
Pydantic schemas for the geometry JSON file format
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from maxdist.models.geometry import CurveGraph, PointCloud


class CloudDocument(BaseModel):
    """Point cloud file: {"dimension": n, "points": [[x, y, ...], ...]}"""

    dimension: int = Field(..., ge=2, description="Ambient dimension n")
    points: List[List[float]] = Field(..., description="Sample points")
    density: Optional[float] = Field(None, ge=0, description="Certified density delta of the sample")

    @model_validator(mode="after")
    def _check_dimension(self):
        for point in self.points:
            if len(point) != self.dimension:
                raise ValueError(f"point {point} does not have dimension {self.dimension}")
        return self

    @classmethod
    def from_cloud(cls, cloud: PointCloud) -> "CloudDocument":
        return cls(
            dimension=cloud.dimension,
            points=cloud.points.tolist(),
            density=cloud.density,
        )

    def to_cloud(self) -> PointCloud:
        points = np.asarray(self.points, dtype=float).reshape(-1, self.dimension)
        return PointCloud(points=points, density=self.density)


class GraphDocument(BaseModel):
    """Curve file: {"vertices": [[x, y, ...], ...], "edges": [[i, j], ...]}"""

    vertices: List[List[float]] = Field(..., description="Vertex coordinates")
    edges: List[List[int]] = Field(default_factory=list, description="Index pairs, one per straight segment")

    @classmethod
    def from_graph(cls, graph: CurveGraph) -> "GraphDocument":
        return cls(vertices=graph.vertices.tolist(), edges=graph.edges.tolist())

    def to_graph(self) -> CurveGraph:
        return CurveGraph(vertices=self.vertices, edges=self.edges)

