"""
Geometry Service

Distances from points to polygonal curves, one-sided deviation F_E, Hausdorff
distance, curve length, diameter and tree checks.

Point-to-curve distances are exact: long segments are split into pieces of
bounded length for indexing only, a cKDTree over piece midpoints narrows the
candidates, and the closed-form point-to-segment distance decides.
"""

import logging
import math
from typing import Optional, Tuple, Union

import networkx as nx
import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree
from scipy.spatial.distance import pdist

from maxdist.core.errors import GeometryError
from maxdist.models.geometry import CurveGraph, Point, PointCloud

logger = logging.getLogger(__name__)

# Below this many point/piece pairs the dense distance matrix is used directly
_DENSE_PAIR_LIMIT = 2_000_000
_MAX_PIECES = 200_000
_CHUNK = 20_000
_EXACT_DIAMETER_LIMIT = 4000


def point_segment_distances(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """
    Elementwise distance from points[i] to the closed segment [starts[i], ends[i]].

    All three arrays broadcast against each other.
    """
    direction = ends - starts
    denom = np.einsum("...k,...k->...", direction, direction)
    offset = points - starts
    numer = np.einsum("...k,...k->...", offset, direction)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom > 0, numer / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = starts + t[..., None] * direction
    return np.linalg.norm(points - closest, axis=-1)


def _check_dimension(points: np.ndarray, graph: CurveGraph) -> None:
    if graph.is_empty:
        raise GeometryError("curve graph is empty")
    if points.shape[1] != graph.dimension:
        raise GeometryError(
            f"dimension mismatch: points are {points.shape[1]}-D, curve is {graph.dimension}-D"
        )


def _split_pieces(starts: np.ndarray, ends: np.ndarray, piece_length: float) -> Tuple[np.ndarray, np.ndarray]:
    lengths = np.linalg.norm(ends - starts, axis=1)
    counts = np.maximum(1, np.ceil(lengths / piece_length).astype(np.int64))
    owner = np.repeat(np.arange(len(starts)), counts)
    first = np.cumsum(counts) - counts
    local = np.arange(owner.size) - first[owner]
    t0 = (local / counts[owner])[:, None]
    t1 = ((local + 1) / counts[owner])[:, None]
    direction = (ends - starts)[owner]
    return starts[owner] + t0 * direction, starts[owner] + t1 * direction


def distances_to_curve(points: np.ndarray, graph: CurveGraph) -> np.ndarray:
    """
    Exact Euclidean distance from every row of `points` to the union of the
    graph's closed segments (isolated vertices count as points of the curve).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    _check_dimension(points, graph)

    used = np.zeros(graph.vertex_count, dtype=bool)
    used[graph.edges.ravel()] = True
    isolated = graph.vertices[~used]

    starts, ends = graph.segments()
    # Isolated vertices become zero-length segments
    return distances_to_segments(points, np.vstack([starts, isolated]), np.vstack([ends, isolated]))


def distances_to_segments(points: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Exact distance from each point to the union of the segments [starts[i], ends[i]]."""
    if len(points) == 0:
        return np.zeros(0)
    if len(starts) == 0:
        return np.full(len(points), np.inf)
    if len(points) * len(starts) <= _DENSE_PAIR_LIMIT:
        dense = point_segment_distances(points[:, None, :], starts[None, :, :], ends[None, :, :])
        return dense.min(axis=1)

    lengths = np.linalg.norm(ends - starts, axis=1)
    piece_length = max(float(np.median(lengths)), float(lengths.sum()) / _MAX_PIECES, 1e-12)
    piece_starts, piece_ends = _split_pieces(starts, ends, piece_length)
    midpoints = 0.5 * (piece_starts + piece_ends)
    half = 0.5 * np.linalg.norm(piece_ends - piece_starts, axis=1).max()
    tree = cKDTree(midpoints)

    result = np.empty(len(points))
    for begin in range(0, len(points), _CHUNK):
        chunk = points[begin:begin + _CHUNK]
        # Nearest midpoint lies on the curve, so it bounds the true distance from above
        upper, _ = tree.query(chunk)
        candidates = tree.query_ball_point(chunk, upper + half + 1e-12)
        sizes = np.fromiter((len(c) for c in candidates), dtype=np.int64, count=len(candidates))
        piece_idx = np.fromiter((i for c in candidates for i in c), dtype=np.int64, count=int(sizes.sum()))
        owner = np.repeat(np.arange(len(chunk)), sizes)
        dists = point_segment_distances(chunk[owner], piece_starts[piece_idx], piece_ends[piece_idx])
        best = upper.copy()
        np.minimum.at(best, owner, dists)
        result[begin:begin + len(chunk)] = best
    return result


def dist_point_curve(p: Union[Point, np.ndarray, tuple], graph: CurveGraph) -> float:
    """
    Distance from a single point to the curve.

    Raises:
        GeometryError: dimension mismatch or empty graph
    """
    coords = p.as_array() if isinstance(p, Point) else np.asarray(p, dtype=float)
    return float(distances_to_curve(coords[None, :], graph)[0])


def deviation_with_witness(cloud: PointCloud, graph: CurveGraph) -> Tuple[float, np.ndarray]:
    """F_E(graph) together with the cloud point that realizes it (lowest index on ties)."""
    cloud.require_non_empty()
    distances = distances_to_curve(cloud.points, graph)
    worst = int(np.argmax(distances))
    return float(distances[worst]), cloud.points[worst]


def one_sided_deviation(cloud: PointCloud, graph: CurveGraph) -> float:
    """
    F_E(A) = max over the cloud of the distance to the curve.

    Raises:
        GeometryError: empty cloud, empty graph or dimension mismatch
    """
    return deviation_with_witness(cloud, graph)[0]


def sample_curve(graph: CurveGraph, eps: float) -> PointCloud:
    """
    Points along every edge spaced at most `eps` apart, plus all vertices.

    The returned cloud is (eps/2)-dense in the curve and records that density.
    """
    if eps <= 0:
        raise GeometryError(f"sampling eps must be positive, got {eps}")
    if graph.is_empty:
        raise GeometryError("curve graph is empty")
    starts, ends = graph.segments()
    parts = [graph.vertices]
    if len(starts):
        piece_starts, _ = _split_pieces(starts, ends, eps)
        parts.append(piece_starts)
    return PointCloud(points=np.vstack(parts), density=eps / 2)


def _as_cloud(item: Union[PointCloud, CurveGraph], eps: Optional[float]) -> PointCloud:
    if isinstance(item, CurveGraph):
        if eps is None:
            raise GeometryError("sampling eps is required when comparing curves")
        return sample_curve(item, eps)
    return item


def hausdorff_distance(
    a: Union[PointCloud, CurveGraph],
    b: Union[PointCloud, CurveGraph],
    eps: Optional[float] = None,
) -> float:
    """
    Symmetric Hausdorff distance between two sample clouds.

    Curves are first sampled with spacing `eps`; the answer is then within
    eps/2 of the distance between the underlying curves.

    Raises:
        GeometryError: empty input, dimension mismatch or missing eps for a curve
    """
    cloud_a, cloud_b = _as_cloud(a, eps), _as_cloud(b, eps)
    cloud_a.require_non_empty("first set")
    cloud_b.require_non_empty("second set")
    if cloud_a.dimension != cloud_b.dimension:
        raise GeometryError("dimension mismatch between Hausdorff inputs")
    forward, _ = cKDTree(cloud_b.points).query(cloud_a.points)
    backward, _ = cKDTree(cloud_a.points).query(cloud_b.points)
    return float(max(forward.max(), backward.max()))


def edge_lengths(graph: CurveGraph) -> np.ndarray:
    starts, ends = graph.segments()
    return np.linalg.norm(ends - starts, axis=1)


def curve_length(graph: CurveGraph) -> float:
    """H1 length of a polygonal graph: the sum of its edge lengths."""
    return float(edge_lengths(graph).sum())


def diameter(cloud: PointCloud) -> float:
    """
    Largest pairwise distance in the cloud.

    Small clouds use all pairs; larger ones restrict the pairs to convex hull
    vertices.
    """
    cloud.require_non_empty()
    points = cloud.points
    if len(points) < 2:
        return 0.0
    if len(points) > _EXACT_DIAMETER_LIMIT:
        try:
            points = points[ConvexHull(points).vertices]
        except QhullError:
            # Flat input: joggled hull still returns original extreme points
            points = points[ConvexHull(points, qhull_options="QJ").vertices]
    return float(pdist(points).max())


def to_networkx(graph: CurveGraph) -> nx.Graph:
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(graph.vertex_count))
    nx_graph.add_edges_from(map(tuple, graph.edges.tolist()))
    return nx_graph


def is_connected(graph: CurveGraph) -> bool:
    return graph.vertex_count > 0 and nx.is_connected(to_networkx(graph))


def is_tree(graph: CurveGraph) -> bool:
    """True iff the graph is connected and has exactly V - 1 edges."""
    return is_connected(graph) and graph.edge_count == graph.vertex_count - 1


def polygon_circle(
    center: np.ndarray,
    radius: float,
    max_chord_error: float,
    basis: Optional[np.ndarray] = None,
    min_sides: int = 3,
) -> CurveGraph:
    """
    Closed regular polygon inscribed in a circle, with sagitta <= max_chord_error.

    `basis` holds two orthonormal vectors spanning the circle's plane (default
    the first two coordinate axes).
    """
    center = np.asarray(center, dtype=float)
    if radius <= 0 or max_chord_error <= 0:
        raise GeometryError("circle radius and chord error must be positive")
    if basis is None:
        basis = np.eye(len(center))[:2]
    ratio = min(1.0, max_chord_error / radius)
    # sagitta = radius * (1 - cos(pi / sides))
    sides = max(3, min_sides, math.ceil(math.pi / math.acos(1.0 - ratio)))
    angles = 2 * math.pi * np.arange(sides) / sides
    vertices = center + radius * (np.cos(angles)[:, None] * basis[0] + np.sin(angles)[:, None] * basis[1])
    return CurveGraph.path(vertices, closed=True)
