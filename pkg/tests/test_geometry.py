"""
Tests for the geometry service: distances, deviation, Hausdorff distance,
length, diameter and tree checks.
"""
import numpy as np
import pytest

from maxdist.core.errors import GeometryError
from maxdist.models.geometry import CurveGraph, Point, PointCloud
from maxdist.services.geometry_service import (
    curve_length,
    diameter,
    dist_point_curve,
    distances_to_curve,
    hausdorff_distance,
    is_tree,
    one_sided_deviation,
    point_segment_distances,
    polygon_circle,
    sample_curve,
)


def test_dist_point_curve_examples(unit_segment):
    """Test the closest-point formula against hand-computed distances."""
    assert dist_point_curve(Point((0.5, 0.05)), unit_segment) == pytest.approx(0.05)
    assert dist_point_curve((0.0, 0.0), unit_segment) == 0.0
    assert dist_point_curve((2.0, 0.0), unit_segment) == pytest.approx(1.0)


def test_dist_point_curve_dimension_mismatch(unit_segment):
    with pytest.raises(GeometryError):
        dist_point_curve((0.0, 0.0, 1.0), unit_segment)


def test_dist_point_curve_empty_graph():
    with pytest.raises(GeometryError):
        dist_point_curve((0.0, 0.0), CurveGraph(vertices=np.zeros((0, 2))))


def test_one_sided_deviation_examples(unit_segment):
    """Test F_E on a single point, on vertices and on a one-vertex graph."""
    assert one_sided_deviation(PointCloud([(0.5, 0.05)]), unit_segment) == pytest.approx(0.05)
    assert one_sided_deviation(PointCloud([(0.0, 0.0), (1.0, 0.0)]), unit_segment) == 0.0
    lone = CurveGraph.single_point((0.0, 0.0))
    assert one_sided_deviation(PointCloud([(0.0, 1.0), (0.0, 2.0)]), lone) == pytest.approx(2.0)


def test_one_sided_deviation_empty_cloud(unit_segment):
    with pytest.raises(GeometryError):
        one_sided_deviation(PointCloud(np.zeros((0, 2))), unit_segment)


def test_deviation_decreases_when_segments_are_added(unit_segment):
    """Test that a supergraph never increases F_E."""
    rng = np.random.default_rng(3)
    cloud = PointCloud(rng.uniform(-1, 2, size=(200, 2)))
    larger = unit_segment.union(CurveGraph.path([(0.0, 1.0), (1.0, 1.0)]))
    assert one_sided_deviation(cloud, larger) <= one_sided_deviation(cloud, unit_segment)


def test_hausdorff_examples():
    single = PointCloud([(0.0, 0.0)])
    assert hausdorff_distance(single, single) == 0.0
    assert hausdorff_distance(single, PointCloud([(1.0, 0.0)])) == pytest.approx(1.0)


def test_hausdorff_segment_sample_against_endpoints(unit_segment):
    """Test that the midpoint is the farthest point from the endpoints."""
    eps = 1e-3
    distance = hausdorff_distance(unit_segment, PointCloud([(0.0, 0.0), (1.0, 0.0)]), eps=eps)
    assert abs(distance - 0.5) <= eps


def test_hausdorff_symmetry_and_triangle_inequality():
    rng = np.random.default_rng(11)
    a, b, c = (PointCloud(rng.normal(size=(50, 2))) for _ in range(3))
    assert hausdorff_distance(a, b) == hausdorff_distance(b, a)
    assert hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12


def test_hausdorff_requires_eps_for_curves(unit_segment):
    with pytest.raises(GeometryError):
        hausdorff_distance(unit_segment, PointCloud([(0.0, 0.0)]))


def test_curve_length_examples(koch_polyline_depth2):
    assert curve_length(CurveGraph.path([(0.0, 0.0), (3.0, 0.0)])) == pytest.approx(3.0)
    rectangle = CurveGraph.path([(0, 0), (1, 0), (1, 1 / 3), (0, 1 / 3)], closed=True)
    assert curve_length(rectangle) == pytest.approx(8 / 3)
    assert curve_length(koch_polyline_depth2) == pytest.approx(16 / 9)


def test_curve_length_additive_over_disjoint_union(unit_segment, koch_polyline_depth2):
    union = unit_segment.union(koch_polyline_depth2)
    assert curve_length(union) == pytest.approx(curve_length(unit_segment) + curve_length(koch_polyline_depth2))


def test_diameter_examples(koch_cloud_depth4):
    assert diameter(PointCloud([(0.3, 0.4)])) == 0.0
    assert diameter(PointCloud([(0.0, 0.0), (3.0, 0.0)])) == pytest.approx(3.0)
    assert diameter(koch_cloud_depth4) == pytest.approx(1.0, abs=1e-12)


def test_diameter_large_cloud_uses_hull():
    """Test the hull path against the known extreme pair."""
    rng = np.random.default_rng(5)
    points = rng.uniform(-1, 1, size=(6000, 2))
    points[0], points[1] = (-2.0, 0.0), (2.0, 0.0)
    assert diameter(PointCloud(points)) == pytest.approx(4.0)


def test_is_tree_examples():
    assert is_tree(CurveGraph.path([(0, 0), (1, 0)]))
    assert not is_tree(CurveGraph.path([(0, 0), (1, 0), (0, 1)], closed=True))
    star = CurveGraph(vertices=[(0, 0), (1, 0), (0, 1), (-1, 0)], edges=[(0, 1), (0, 2), (0, 3)])
    assert is_tree(star)
    assert not is_tree(CurveGraph(vertices=[(0, 0), (1, 0), (5, 5)], edges=[(0, 1)]))


def test_distances_match_brute_force_sampling():
    """Test exact distances against dense sampling of every segment."""
    rng = np.random.default_rng(7)
    for _ in range(5):
        vertices = rng.uniform(0, 1, size=(5, 2))
        graph = CurveGraph.path(vertices)
        queries = rng.uniform(-0.5, 1.5, size=(20, 2))
        t = np.linspace(0.0, 1.0, 10_001)[:, None]
        starts, ends = graph.segments()
        samples = np.vstack([s + t * (e - s) for s, e in zip(starts, ends)])
        brute = np.linalg.norm(queries[:, None, :] - samples[None, :, :], axis=2).min(axis=1)
        exact = distances_to_curve(queries, graph)
        assert np.all(exact <= brute + 1e-12)
        # Sample spacing is at most 1.5 / 10^4, so the brute force overshoots by at most half that
        assert np.allclose(exact, brute, atol=1e-4)


def test_distances_indexed_path_matches_dense():
    """Test the KD-tree path used for large inputs against the dense formula."""
    rng = np.random.default_rng(9)
    vertices = np.cumsum(rng.normal(scale=0.01, size=(3000, 2)), axis=0)
    graph = CurveGraph.path(vertices)
    queries = rng.uniform(vertices.min(axis=0), vertices.max(axis=0), size=(1000, 2))
    indexed = distances_to_curve(queries, graph)
    starts, ends = graph.segments()
    dense = point_segment_distances(queries[:, None, :], starts[None, :, :], ends[None, :, :]).min(axis=1)
    assert np.allclose(indexed, dense, atol=1e-12)


def test_sample_curve_density(unit_segment):
    cloud = sample_curve(unit_segment, 0.1)
    assert cloud.density == pytest.approx(0.05)
    xs = np.sort(cloud.points[:, 0])
    assert np.max(np.diff(xs)) <= 0.1 + 1e-12


def test_polygon_circle_chord_error():
    polygon = polygon_circle(np.zeros(2), 1.0, 0.01)
    sides = polygon.vertex_count
    assert 1 - np.cos(np.pi / sides) <= 0.01
    assert curve_length(polygon) < 2 * np.pi
