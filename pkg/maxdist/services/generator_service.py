"""
Generator Service

Test sets as certified clouds and reference curves: the Koch curve, its
similarity maps, primitive sets (segment, circle, point pair) and lattice
samples of r-neighborhoods.
"""

import logging
import math
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.spatial import cKDTree

from maxdist.core.config import GEOM_TOL, MAX_CLOUD_SIZE
from maxdist.core.errors import DomainError
from maxdist.models.geometry import CurveGraph, PointCloud
from maxdist.schemas.generators import KOCH_MAX_DEPTH, KochSpec, SampleSpec
from maxdist.services.geometry_service import point_segment_distances, polygon_circle

logger = logging.getLogger(__name__)

KOCH_APEX_HEIGHT = math.sqrt(3) / 6
# Hull gap, in copy sizes, between a group's second copy and the group before it
# when the curve turns by -120 degrees at their junction
SUBCOPY_SEPARATION = math.sqrt(3) / 2
# Rotation by +60 degrees; the bump points to positive y for a left-to-right base
_TURN = complex(math.cos(math.pi / 3), math.sin(math.pi / 3))
_SAMPLER_DEPTH = 20


def _to_xy(z: np.ndarray) -> np.ndarray:
    return np.column_stack([z.real, z.imag])


def koch_vertices(depth: int) -> np.ndarray:
    """Complex vertex list of the depth-m Koch polyline from 0 to 1."""
    z = np.array([0.0, 1.0], dtype=complex)
    for _ in range(depth):
        p1, p2 = z[:-1], z[1:]
        third = (p2 - p1) / 3.0
        refined = np.empty(4 * len(p1) + 1, dtype=complex)
        refined[0::4] = z
        refined[1::4] = p1 + third
        refined[2::4] = p1 + third + third * _TURN
        refined[3::4] = p1 + 2.0 * third
        z = refined
    return z


def koch_curve(spec: KochSpec) -> CurveGraph:
    """
    Koch polyline with 4^m + 1 vertices from (0,0) to (1,0) and length (4/3)^m.

    Args:
        spec: Refinement depth

    Returns:
        Path graph through the depth-m vertices
    """
    return CurveGraph.path(_to_xy(koch_vertices(spec.depth)))


def koch_depth_for_density(delta: float) -> int:
    """
    Smallest depth m with 3^-m <= delta and 3^-m * sqrt(3)/6 <= delta/2.

    Raises:
        DomainError: delta below what depth 12 can certify
    """
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    for depth in range(KOCH_MAX_DEPTH + 1):
        spacing = 3.0 ** -depth
        if spacing <= delta and spacing * KOCH_APEX_HEIGHT <= delta / 2:
            return depth
    raise DomainError(f"delta={delta} needs Koch depth beyond {KOCH_MAX_DEPTH}")


def koch_vertex_density(depth: int) -> float:
    """
    Certified density of the depth-m vertex set in the limit curve.

    Each piece of the limit curve between consecutive vertices lies in a
    triangle with base 3^-m and apex height 3^-m sqrt(3)/6; its farthest point
    from both base ends is the apex, at 3^-m / sqrt(3).
    """
    return 3.0 ** -depth / math.sqrt(3)


def koch_cloud(spec: KochSpec, sample: SampleSpec) -> PointCloud:
    """
    Vertex cloud of the Koch curve, delta-dense in the limit curve.

    The depth is the larger of `spec.depth` and the smallest depth meeting
    `sample.delta`. The recorded density is the certified one, which never
    exceeds `sample.delta`.
    """
    depth = max(spec.depth, koch_depth_for_density(sample.delta))
    if depth > KOCH_MAX_DEPTH:
        raise DomainError(f"Koch depth {depth} exceeds {KOCH_MAX_DEPTH}")
    logger.debug(f"Koch cloud at depth {depth} for delta={sample.delta}")
    return PointCloud(points=_to_xy(koch_vertices(depth)), density=koch_vertex_density(depth))


# Similarity maps f_0..f_3 of the Koch curve, as (offset, complex factor)
KOCH_MAPS: Tuple[Tuple[complex, complex], ...] = (
    (0j, 1 / 3 + 0j),
    (1 / 3 + 0j, _TURN / 3),
    (complex(0.5, KOCH_APEX_HEIGHT), _TURN.conjugate() / 3),
    (2 / 3 + 0j, 1 / 3 + 0j),
)


def koch_sampler(t, depth: int = _SAMPLER_DEPTH) -> np.ndarray:
    """
    Natural parameterization of the Koch curve, gamma: [0,1] -> R^2.

    gamma(j / 4^m) is the j-th depth-m vertex; between those nodes the
    depth-`depth` polyline is interpolated linearly, so the error against the
    limit curve is at most 3^-depth.
    """
    t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), 0.0, 1.0)
    scaled = t * float(4 ** depth)
    index = np.minimum(np.floor(scaled).astype(np.int64), 4 ** depth - 1)
    z = (scaled - index).astype(complex)
    offsets = np.array([m[0] for m in KOCH_MAPS])
    factors = np.array([m[1] for m in KOCH_MAPS])
    for _ in range(depth):
        digit = index % 4
        z = offsets[digit] + factors[digit] * z
        index //= 4
    return _to_xy(z)


def koch_subcopies(level: int) -> np.ndarray:
    """
    Start and end points of the 4^k similar copies of the curve at level k.

    Returns:
        (4^k, 2, 2) array; copy j maps [0,1] onto the j-th depth-k sub-segment
    """
    vertices = _to_xy(koch_vertices(level))
    return np.stack([vertices[:-1], vertices[1:]], axis=1)


def subcopy_hull(start: np.ndarray, end: np.ndarray) -> np.ndarray:
    """Triangle (start, apex, end) containing the copy of the curve over [start, end]."""
    base = end - start
    normal = np.array([-base[1], base[0]])
    return np.array([start, start + 0.5 * base + KOCH_APEX_HEIGHT * normal, end])


def _triangle_distances(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Distances between disjoint triangles, (..., 3, 2) arrays broadcast together."""
    first_ends = np.roll(first, -1, axis=-2)
    second_ends = np.roll(second, -1, axis=-2)
    one_way = point_segment_distances(first[..., :, None, :], second[..., None, :, :], second_ends[..., None, :, :])
    other_way = point_segment_distances(second[..., :, None, :], first[..., None, :, :], first_ends[..., None, :, :])
    return np.minimum(one_way.min(axis=(-2, -1)), other_way.min(axis=(-2, -1)))


def subcopy_separation(scale: int) -> float:
    """
    Smallest distance between the hull of the second copy in one group and
    the hull of any other group, at scale k.

    The curve splits into 4^(k-1) copies of size 3^(1-k); runs of four
    consecutive copies form the 4^(k-2) groups, each a level-(k-2) copy.
    Disjoint triangles are closest between a vertex of one and an edge of the
    other. With a single group (k = 2) there is nothing to separate.

    Raises:
        DomainError: k < 2
    """
    if scale < 2:
        raise DomainError(f"the group decomposition needs k >= 2, got {scale}")
    groups = koch_subcopies(scale - 2)
    if len(groups) < 2:
        return math.inf
    seconds = np.stack([subcopy_hull(s, e) for s, e in koch_subcopies(scale - 1)[1::4]])
    group_hulls = np.stack([subcopy_hull(s, e) for s, e in groups])
    gaps = _triangle_distances(seconds[:, None], group_hulls[None, :])
    np.fill_diagonal(gaps, np.inf)
    return float(gaps.min())


def _lattice_basis(dimension: int, delta: float) -> Tuple[np.ndarray, float]:
    """
    Lattice generator matrix (rows) whose disk fills are delta-dense, and its pitch.

    The lattice has covering radius delta/2, not delta, because the fill keeps
    only points inside the ball: for x in B(c, R), the point x' moved delta/2
    toward c has its nearest lattice point y within delta/2, and y lies in
    B(c, R) with |y - x| <= delta. A pitch of delta would leave gaps near the
    boundary.
    """
    if dimension == 2:
        # Hexagonal lattice, covering radius pitch/sqrt(3) = delta/2
        pitch = delta * math.sqrt(3) / 2
        return np.array([[pitch, 0.0], [pitch / 2, pitch * math.sqrt(3) / 2]]), pitch
    # Cubic lattice, covering radius pitch*sqrt(n)/2 = delta/2
    pitch = delta / math.sqrt(dimension)
    return np.eye(dimension) * pitch, pitch


def _disk_fill(centers: np.ndarray, radius: float, delta: float) -> np.ndarray:
    """Global-lattice points inside the union of the balls B(center, radius)."""
    dimension = centers.shape[1]
    basis, pitch = _lattice_basis(dimension, delta)
    inverse = np.linalg.inv(basis)
    reach = int(math.ceil(2 * (radius + 2 * pitch) / pitch)) + 1
    axis = np.arange(-reach, reach + 1)
    template = np.stack(np.meshgrid(*([axis] * dimension), indexing="ij"), axis=-1).reshape(-1, dimension)
    template = template[np.linalg.norm(template @ basis, axis=1) <= radius + 2 * pitch]

    chunk = max(1, 4_000_000 // max(1, len(template)))
    kept = []
    for begin in range(0, len(centers), chunk):
        block = centers[begin:begin + chunk]
        base = np.rint(block @ inverse).astype(np.int64)
        indices = (base[:, None, :] + template[None, :, :]).reshape(-1, dimension)
        owners = np.repeat(np.arange(len(block)), len(template))
        points = indices @ basis
        inside = np.linalg.norm(points - block[owners], axis=1) <= radius
        kept.append(np.unique(indices[inside], axis=0))
    indices = np.unique(np.vstack(kept), axis=0)
    if len(indices) > MAX_CLOUD_SIZE:
        raise DomainError(f"neighborhood sample would hold {len(indices)} points (limit {MAX_CLOUD_SIZE})")
    return indices @ basis


def _boundary_samples(centers: np.ndarray, radius: float, delta: float) -> np.ndarray:
    """Points on the ball boundaries that no other ball contains deeply."""
    dimension = centers.shape[1]
    if dimension == 2:
        count = max(4, 4 * int(math.ceil(math.pi * radius / (2 * delta))))
        angles = 2 * math.pi * np.arange(count) / count
        ring = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    else:
        ring = radius * np.vstack([np.eye(dimension), -np.eye(dimension)])
    candidates = (centers[:, None, :] + ring[None, :, :]).reshape(-1, dimension)
    nearest, _ = cKDTree(centers).query(candidates)
    return candidates[nearest >= radius - delta]


def neighborhood_cloud(cloud: PointCloud, r: float, sample: SampleSpec) -> PointCloud:
    """
    Lattice sample of B(E, r).

    Every cloud point gets the global-lattice points inside its ball of radius
    r plus samples on the ball boundary; lattice points shared by several
    balls appear once. The result is (delta_E + sample.delta)-dense in B(E, r).

    Args:
        cloud: Sample of E with its density (None counts as 0)
        r: Neighborhood radius
        sample: Lattice density request

    Raises:
        DomainError: unless r > sample.delta > 0, or on an empty cloud
    """
    if not r > sample.delta > 0:
        raise DomainError(f"need r > delta > 0, got r={r}, delta={sample.delta}")
    cloud.require_non_empty()
    centers = cloud.points
    if sample.jitter:
        rng = np.random.default_rng(sample.seed)
        shift = rng.uniform(-0.5, 0.5, size=centers.shape[1]) * sample.delta * 0.5
    else:
        shift = np.zeros(centers.shape[1])
    fill = _disk_fill(centers - shift, r, sample.delta) + shift
    rim = _boundary_samples(centers, r, sample.delta)
    points = np.vstack([fill, rim])
    density = (cloud.density or 0.0) + sample.delta
    logger.info(f"Neighborhood sample: {len(points)} points for {len(cloud)} centers at r={r}")
    return PointCloud(points=points, density=density)


def segment_set(start, end, delta: float) -> Tuple[PointCloud, CurveGraph]:
    """Evenly spaced samples of [start, end] with spacing <= delta (density delta/2)."""
    start, end = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    length = float(np.linalg.norm(end - start))
    if length == 0:
        raise DomainError("segment endpoints coincide")
    # Small tolerance so lengths that are exact multiples of delta keep their count
    count = int(math.ceil(length / delta - GEOM_TOL))
    t = np.linspace(0.0, 1.0, count + 1)[:, None]
    points = start + t * (end - start)
    return PointCloud(points=points, density=length / count / 2), CurveGraph.path([start, end])


def circle_set(center, radius: float, delta: float) -> Tuple[PointCloud, CurveGraph]:
    """Vertices spaced <= delta around the circle; the polygon has chord error <= delta/2."""
    if radius <= 0:
        raise DomainError(f"circle radius must be positive, got {radius}")
    sides = math.ceil(2 * math.pi * radius / delta - GEOM_TOL)
    polygon = polygon_circle(np.asarray(center, dtype=float), radius, delta / 2, min_sides=sides)
    # Arc midpoints are the circle points farthest from the vertex set
    density = 2 * radius * math.sin(math.pi / (2 * polygon.vertex_count))
    return PointCloud(points=polygon.vertices, density=density), polygon


def two_points_set(a, b) -> Tuple[PointCloud, CurveGraph]:
    """The pair {a, b} (exact, density 0) with the segment [a, b] as reference."""
    return PointCloud(points=[list(a), list(b)], density=0.0), CurveGraph.path([a, b])


_PRIMITIVES: Dict[str, Callable[..., Tuple[PointCloud, CurveGraph]]] = {
    "segment": lambda p, delta: segment_set(p["start"], p["end"], delta),
    "circle": lambda p, delta: circle_set(p.get("center", (0.0, 0.0)), p["radius"], delta),
    "two_points": lambda p, delta: two_points_set(p["a"], p["b"]),
}


def primitive_set(kind: str, params: dict, delta: float) -> Tuple[PointCloud, CurveGraph]:
    """
    Standard test sets: a delta-dense cloud plus the exact reference curve.

    Args:
        kind: "segment" (start, end), "circle" (center, radius) or "two_points" (a, b)
        params: Parameters for the kind
        delta: Sample spacing

    Raises:
        DomainError: unknown kind or invalid parameters
    """
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    builder = _PRIMITIVES.get(kind)
    if builder is None:
        raise DomainError(f"unknown primitive {kind!r}; expected one of {sorted(_PRIMITIVES)}")
    try:
        return builder(params, delta)
    except KeyError as exc:
        raise DomainError(f"{kind} is missing parameter {exc.args[0]!r}") from exc
