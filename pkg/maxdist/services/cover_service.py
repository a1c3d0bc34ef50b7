"""
Cover Service

Constructive upper bounds: the unit-scale rectangle, the rectangle cover of
the Koch curve at scale k_r, Hölder circle covers and the circle families
that cover a ball in R^n.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np

from maxdist.core.errors import DomainError
from maxdist.models.geometry import CurveGraph, PointCloud
from maxdist.models.tags import BoundMethod
from maxdist.schemas.coverage import CoverageCertificate
from maxdist.schemas.covers import BOUND_RTOL, CircleFamilyReport, CircleSpec, CoverReport
from maxdist.schemas.generators import KochSpec, SampleSpec
from maxdist.services import coverage_service
from maxdist.services.bounds_service import appropriate_scale, scale_index
from maxdist.services.generator_service import koch_cloud, koch_sampler, koch_subcopies
from maxdist.services.geometry_service import curve_length, polygon_circle

logger = logging.getLogger(__name__)

MAX_RECTANGLES = 1_000_000
UNIT_COVER_BOUND = 3.0
RECTANGLE_HEIGHT = 1 / 3
# Koch target density as a fraction of r; the lattice takes the rest of r/10
_TARGET_DENSITY_FRACTION = 1 / 40


def _koch_neighborhood_certificate(graph: CurveGraph, r: float) -> CoverageCertificate:
    cloud = koch_cloud(KochSpec(depth=0), SampleSpec(delta=_TARGET_DENSITY_FRACTION * r))
    sample = SampleSpec(delta=coverage_service.DEFAULT_DELTA_FRACTION * r - cloud.density)
    return coverage_service.covers_neighborhood(graph, cloud, r, sample)


def unit_scale_cover() -> CurveGraph:
    """Boundary of [0,1] x [0,1/3]; its r-neighborhood contains B(S, r) for r >= 1/3."""
    return CurveGraph.path(
        [(0.0, 0.0), (1.0, 0.0), (1.0, RECTANGLE_HEIGHT), (0.0, RECTANGLE_HEIGHT)],
        closed=True,
    )


def unit_scale_report(r: float) -> CoverReport:
    """
    Unit rectangle with its certificate against B(S, r).

    Raises:
        DomainError: r outside [1/3, 1)
        CertificateError: the certificate failed
    """
    if not 1 / 3 <= r < 1:
        raise DomainError(f"the unit-scale cover is certified for 1/3 <= r < 1, got {r}")
    curve = unit_scale_cover()
    certificate = coverage_service.require_pass(
        _koch_neighborhood_certificate(curve, r), "unit-scale rectangle"
    )
    return CoverReport(
        curve=curve,
        length=curve_length(curve),
        theoretical_bound=UNIT_COVER_BOUND,
        certificate=certificate,
        method=BoundMethod.UNIT_RECTANGLE,
        pieces=1,
    )


def rectangle_chain(level: int) -> CurveGraph:
    """
    One rectangle per level-k Koch sub-segment: base on the sub-segment,
    height a third of it, on the side of the bump. Neighbors share a corner.
    """
    copies = koch_subcopies(level)
    starts, ends = copies[:, 0, :], copies[:, 1, :]
    base = ends - starts
    normals = np.column_stack([-base[:, 1], base[:, 0]]) * RECTANGLE_HEIGHT
    count = len(copies)
    nodes = np.vstack([starts, ends[-1:]])
    top_start = starts + normals
    top_end = ends + normals
    vertices = np.vstack([nodes, top_start, top_end])
    j = np.arange(count)
    first_top, second_top = count + 1 + j, 2 * count + 1 + j
    edges = np.concatenate(
        [
            np.column_stack([j, j + 1]),
            np.column_stack([j + 1, second_top]),
            np.column_stack([second_top, first_top]),
            np.column_stack([first_top, j]),
        ]
    )
    return CurveGraph(vertices=vertices, edges=edges)


def snowflake_rectangle_cover(r: float, direct: bool = False) -> CoverReport:
    """
    Rectangle cover of B(S, r) for 0 < r < 1/3 with length (8/3)(4/3)^k_r.

    The certificate comes from self-similarity: each rectangle is the image
    of the unit rectangle under the similarity (ratio 3^-k) that maps S onto
    the corresponding sub-copy, so checking the unit rectangle against
    B(S, 3^k r) covers every copy. With `direct=True` the assembled cover is
    checked against a sample of B(S, r) instead.

    Raises:
        DomainError: r out of range or too many rectangles
        CertificateError: the certificate failed
    """
    scale = scale_index(r)
    count = 4 ** scale.k
    if count > MAX_RECTANGLES:
        raise DomainError(f"r={r} needs {count} rectangles (limit {MAX_RECTANGLES})")
    curve = rectangle_chain(scale.k)

    if direct:
        certificate = _koch_neighborhood_certificate(curve, r)
    else:
        unit = _koch_neighborhood_certificate(unit_scale_cover(), scale.r_prime)
        shrink = 3.0 ** -scale.k
        # The first copy is the plain contraction z -> 3^-k z
        certificate = CoverageCertificate.build(
            r=r,
            delta=unit.delta * shrink,
            worst_distance=unit.worst_distance * shrink,
            worst_point=[c * shrink for c in unit.worst_point],
        )
    coverage_service.require_pass(certificate, f"rectangle cover at r={r}")

    length = curve_length(curve)
    logger.info(f"Rectangle cover r={r}: k={scale.k}, {count} rectangles, length={length:.6f}")
    return CoverReport(
        curve=curve,
        length=length,
        theoretical_bound=UNIT_COVER_BOUND * (4 / 3) ** scale.k,
        certificate=certificate,
        method=BoundMethod.RECT_COVER,
        pieces=count,
    )


def rectangle_cover_length(level: int) -> float:
    """Closed form (8/3)(4/3)^k of the level-k rectangle cover."""
    return (8 / 3) * (4 / 3) ** level


def circle_partition_size(alpha: float, c_gamma: float, r: float) -> int:
    """ceil(10^(1/alpha) C^(1/alpha) 2^k_alpha(r)), the number of parameter steps."""
    steps = (10 ** (1 / alpha)) * (c_gamma ** (1 / alpha)) * 2 ** appropriate_scale(alpha, r)
    return int(math.ceil(steps - 1e-9))


def estimate_holder_constant(sampler: Callable, alpha: float, depth: int = 5) -> float:
    """
    max |gamma(s) - gamma(t)| / |s - t|^alpha over the nodes j / 4^depth.

    A grid estimate: it bounds the true constant from below.
    """
    t = np.linspace(0.0, 1.0, 4 ** depth + 1)
    points = np.asarray(sampler(t), dtype=float)
    best = 0.0
    for i in range(len(t) - 1):
        gaps = np.linalg.norm(points[i + 1:] - points[i], axis=1)
        ratios = gaps / (t[i + 1:] - t[i]) ** alpha
        best = max(best, float(ratios.max()))
    return best


def koch_holder_bound(depth: int = 5) -> float:
    """
    Upper bound on the Hölder constant of the Koch parameterization.

    Any pair s < t with 4^-(k+1) < t - s <= 4^-k lies in two adjacent level-k
    copies, which are similar to two adjacent level-1 copies of the whole
    curve; so the supremum is taken over pairs with t - s > 1/16. Rounding such
    a pair to the nodes j / 4^depth moves each image by at most 3^-depth and the
    gap by at most 4^-depth, which bounds the true constant by
    C_grid (1 + 4^(2 - depth))^alpha + 2 * 3^(2 - depth).
    """
    alpha = math.log(3) / math.log(4)
    grid = estimate_holder_constant(koch_sampler, alpha, depth)
    return grid * (1 + 4.0 ** (2 - depth)) ** alpha + 2 * 3.0 ** (2 - depth)


def holder_cloud(sampler: Callable, alpha: float, c_gamma: float, density: float) -> PointCloud:
    """Samples gamma(j/M) with M chosen so that C (1/(2M))^alpha <= density."""
    steps = int(math.ceil(0.5 * (c_gamma / density) ** (1 / alpha)))
    t = np.linspace(0.0, 1.0, steps + 1)
    return PointCloud(points=np.asarray(sampler(t), dtype=float), density=c_gamma * (0.5 / steps) ** alpha)


def holder_circle_cover(
    sampler: Callable,
    alpha: float,
    c_gamma: float,
    r: float,
    target: Optional[PointCloud] = None,
) -> CoverReport:
    """
    Circles of radius r/2 centered at gamma(i/N) for i < N, chained into one
    connected curve, covering B(gamma([0,1]), r).

    Args:
        sampler: Vectorized map t -> gamma(t) on [0, 1]
        alpha: Hölder exponent in (0, 1]
        c_gamma: Hölder constant >= 1
        r: Radius in (0, 1)
        target: Sample of the curve image with certified density; built from
            the Hölder bound when omitted

    Raises:
        DomainError: parameters out of range, or centers more than r/10 apart (C is
            not a Hölder constant of the sampler)
        CertificateError: the certificate failed
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if c_gamma < 1:
        raise DomainError(f"Hölder constant must be >= 1, got {c_gamma}")
    if not 0 < r < 1:
        raise DomainError(f"holder_circle_cover needs 0 < r < 1, got {r}")

    steps = circle_partition_size(alpha, c_gamma, r)
    t = np.arange(steps) / steps
    centers = np.asarray(sampler(t), dtype=float)
    if centers.shape != (steps, 2):
        raise DomainError(f"sampler returned shape {centers.shape}, expected ({steps}, 2)")

    template = polygon_circle(np.zeros(2), r / 2, r / 100)
    sides = template.vertex_count
    vertices = (centers[:, None, :] + template.vertices[None, :, :]).reshape(-1, 2)
    offsets = (np.arange(steps) * sides)[:, None, None]
    ring_edges = (template.edges[None, :, :] + offsets).reshape(-1, 2)
    # Matching vertex 0 of consecutive polygons: length equals the center spacing
    connectors = np.column_stack([np.arange(steps - 1) * sides, np.arange(1, steps) * sides])
    curve = CurveGraph(vertices=vertices, edges=np.vstack([ring_edges, connectors]))

    spacing = np.linalg.norm(np.diff(centers, axis=0), axis=1)
    if len(spacing) and spacing.max() > (r / 10) * (1 + BOUND_RTOL):
        raise DomainError(
            f"consecutive centers up to {spacing.max():.3g} apart, more than r/10={r / 10:.3g}: "
            f"C={c_gamma} is not a Hölder constant of the sampler"
        )
    length = curve_length(curve)
    bound = steps * math.pi * r + (steps - 1) * r / 10

    if target is None:
        target = holder_cloud(sampler, alpha, c_gamma, _TARGET_DENSITY_FRACTION * r)
    sample = SampleSpec(delta=coverage_service.DEFAULT_DELTA_FRACTION * r - (target.density or 0.0))
    certificate = coverage_service.require_pass(
        coverage_service.covers_neighborhood(curve, target, r, sample), f"circle cover at r={r}"
    )

    exact_length = steps * math.pi * r + float(spacing.sum())
    normalizer = r * c_gamma ** (1 / alpha) * 2 ** appropriate_scale(alpha, r)
    logger.info(f"Circle cover r={r} alpha={alpha:.4f}: {steps} circles, length={length:.6f}")
    return CoverReport(
        curve=curve,
        length=length,
        theoretical_bound=bound,
        certificate=certificate,
        method=BoundMethod.CIRCLE_COVER,
        pieces=steps,
        exact_length=exact_length,
        length_constant=length / normalizer,
    )


def circle_centers_spacing(report: CoverReport) -> np.ndarray:
    """Distances between consecutive circle centers of a circle cover."""
    sides = report.curve.vertex_count // report.pieces
    rings = report.curve.vertices.reshape(report.pieces, sides, -1)
    centers = rings.mean(axis=1)
    return np.linalg.norm(np.diff(centers, axis=0), axis=1)


def _distance_to_circle(points: np.ndarray, circle: CircleSpec) -> np.ndarray:
    center = np.asarray(circle.center)
    basis = np.asarray(circle.basis)
    offset = points - center
    in_plane = offset @ basis.T
    normal_sq = np.maximum(np.einsum("ij,ij->i", offset, offset) - np.einsum("ij,ij->i", in_plane, in_plane), 0.0)
    radial = np.linalg.norm(in_plane, axis=1) - circle.radius
    return np.sqrt(normal_sq + radial ** 2)


def circle_family(dimension: int, r: float, eps: float) -> list:
    """
    Circles of radius r/2 about the origin covering B(0, 1.1 r) within r.

    In R^2 one circle suffices. In R^3 the planes contain the first axis and
    rotate about it by multiples of eps over [0, pi).
    """
    if dimension == 2:
        return [CircleSpec(center=[0.0, 0.0], radius=r / 2, basis=[[1.0, 0.0], [0.0, 1.0]])]
    if dimension != 3:
        raise DomainError(f"circle families are built for n in (2, 3), got {dimension}")
    count = int(math.ceil(math.pi / eps - 1e-9))
    angles = np.arange(count) * (math.pi / count)
    return [
        CircleSpec(
            center=[0.0, 0.0, 0.0],
            radius=r / 2,
            basis=[[1.0, 0.0, 0.0], [0.0, math.cos(phi), math.sin(phi)]],
        )
        for phi in angles
    ]


def rn_circle_family(dimension: int, r: float, eps: float, samples: int = 10_000, seed: int = 0) -> CircleFamilyReport:
    """
    Build the family and validate it on uniform random points of B(0, 1.1 r).

    The report carries `passed=False` instead of raising when a sample is
    farther than r from every circle.

    Raises:
        DomainError: unsupported dimension, r <= 0 or eps outside (0, pi/8]
    """
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    if not 0 < eps <= math.pi / 8:
        raise DomainError(f"eps must lie in (0, pi/8], got {eps}")
    circles = circle_family(dimension, r, eps)

    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(samples, dimension))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = 1.1 * r * rng.uniform(size=samples) ** (1 / dimension)
    points = directions * radii[:, None]

    nearest = np.min(np.stack([_distance_to_circle(points, circle) for circle in circles]), axis=0)
    max_distance = float(nearest.max())
    passed = max_distance <= r
    if not passed:
        logger.warning(f"Circle family n={dimension} eps={eps}: max distance {max_distance:.6g} > r={r}")
    return CircleFamilyReport(
        dimension=dimension,
        r=r,
        eps=eps,
        circles=circles,
        samples=samples,
        max_distance=max_distance,
        passed=passed,
    )
