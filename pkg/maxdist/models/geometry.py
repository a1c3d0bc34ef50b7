"""
Embedded geometry value types

Point, PointCloud and CurveGraph are immutable after construction. Arrays are
stored as read-only numpy copies so instances can be shared freely between
services.
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from maxdist.core.errors import GeometryError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Point:
    """A point of R^n with finite coordinates (n >= 2)."""

    coords: Tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) < 2:
            raise GeometryError(f"Point needs dimension >= 2, got {len(coords)}")
        if not all(np.isfinite(coords)):
            raise GeometryError(f"Point has non-finite coordinates: {coords}")
        object.__setattr__(self, "coords", coords)

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


def _as_points(points) -> np.ndarray:
    if isinstance(points, Point):
        points = [points.coords]
    if isinstance(points, np.ndarray):
        array = points.astype(float)
    else:
        array = np.asarray(
            [p.coords if isinstance(p, Point) else p for p in points], dtype=float
        )
    if array.size == 0:
        return np.zeros((0, 2), dtype=float)
    if array.ndim != 2 or array.shape[1] < 2:
        raise GeometryError(f"Expected an (N, n>=2) coordinate array, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise GeometryError("Coordinates must be finite")
    return array


@dataclass(frozen=True)
class PointCloud:
    """
    Finite sample of a set E.

    Attributes:
        points: (N, n) coordinate array
        density: optional delta such that every point of the underlying set is
            within delta of some sample point
    """

    points: np.ndarray
    density: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(_as_points(self.points)))
        if self.density is not None:
            if not np.isfinite(self.density) or self.density < 0:
                raise GeometryError(f"density must be finite and >= 0, got {self.density}")
            object.__setattr__(self, "density", float(self.density))

    @classmethod
    def from_points(cls, points: Iterable, density: Optional[float] = None) -> "PointCloud":
        return cls(points=list(points), density=density)

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    def require_non_empty(self, what: str = "point cloud") -> None:
        if self.is_empty:
            raise GeometryError(f"{what} is empty")

    def with_density(self, density: Optional[float]) -> "PointCloud":
        return PointCloud(points=self.points, density=density)


@dataclass(frozen=True)
class CurveGraph:
    """
    Embedded graph whose edges are straight segments.

    Attributes:
        vertices: (V, n) coordinate array
        edges: (E, 2) array of vertex index pairs, each stored as (low, high),
            sorted and deduplicated
    """

    vertices: np.ndarray
    edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))

    def __post_init__(self):
        vertices = _as_points(self.vertices)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if np.any(edges[:, 0] == edges[:, 1]):
                raise GeometryError("CurveGraph edges must not be self-loops")
            if edges.min() < 0 or edges.max() >= len(vertices):
                raise GeometryError(
                    f"Edge index out of range for {len(vertices)} vertices"
                )
            edges = np.unique(np.sort(edges, axis=1), axis=0)
        object.__setattr__(self, "vertices", _frozen(vertices))
        object.__setattr__(self, "edges", _frozen(edges))

    @classmethod
    def path(cls, points: Sequence, closed: bool = False) -> "CurveGraph":
        """Polyline through `points` in order, optionally closed into a loop."""
        vertices = _as_points(points)
        count = len(vertices)
        edges = [(i, i + 1) for i in range(count - 1)]
        if closed and count > 2:
            edges.append((count - 1, 0))
        return cls(vertices=vertices, edges=edges)

    @classmethod
    def single_point(cls, point: Sequence[float]) -> "CurveGraph":
        return cls(vertices=[list(point)])

    @property
    def dimension(self) -> int:
        return int(self.vertices.shape[1])

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @property
    def is_empty(self) -> bool:
        return self.vertex_count == 0

    def segments(self) -> Tuple[np.ndarray, np.ndarray]:
        """Start and end coordinate arrays, one row per edge."""
        return self.vertices[self.edges[:, 0]], self.vertices[self.edges[:, 1]]

    def union(self, other: "CurveGraph") -> "CurveGraph":
        """Disjoint union of the two vertex/edge sets (vertices are not merged)."""
        if not self.is_empty and not other.is_empty and self.dimension != other.dimension:
            raise GeometryError("Cannot join graphs of different dimension")
        offset = self.vertex_count
        return CurveGraph(
            vertices=np.vstack([self.vertices, other.vertices]) if not self.is_empty else other.vertices,
            edges=np.vstack([self.edges, other.edges + offset]),
        )
