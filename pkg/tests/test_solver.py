"""
Tests for the heuristic solver: initial tree, local moves and the full pipeline.
"""
import itertools

import numpy as np
import pytest

from maxdist.core.errors import DomainError, GeometryError
from maxdist.models.geometry import CurveGraph, PointCloud
from maxdist.models.tags import MoveKind, TargetMode
from maxdist.schemas.generators import SampleSpec
from maxdist.schemas.solver import SolverConfig
from maxdist.services.bounds_service import best_lower_bound
from maxdist.services.coverage_service import covers
from maxdist.services.generator_service import neighborhood_cloud, segment_set
from maxdist.services.geometry_service import curve_length, distances_to_curve, is_tree
from maxdist.services.solver_service import (
    ball_cut,
    ball_cut_gate,
    connect_tree,
    fermat_point,
    greedy_cover_centers,
    insert_steiner_points,
    prune_loose_branches,
    shortcut_limbs,
    solve,
    vertex_descent,
)


@pytest.fixture
def two_ball_union(two_ball_cloud) -> PointCloud:
    """B(a, 1) ∪ B(b, 1) for a=(0,0), b=(3,0), sampled at density 0.01."""
    return neighborhood_cloud(two_ball_cloud, 1.0, SampleSpec(delta=0.01))


@pytest.fixture
def fine_segment_cloud() -> PointCloud:
    cloud, _ = segment_set((0.0, 0.0), (1.0, 0.0), 0.002)
    return cloud


def test_greedy_cover_single_point():
    target = PointCloud([(0.3, 0.3)], density=0.0)
    centers = greedy_cover_centers(target, 0.1)
    assert len(centers) == 1
    assert np.linalg.norm(centers.points[0] - (0.3, 0.3)) <= 0.09


def test_greedy_cover_reaches_every_point(segment_cloud):
    """Test that every target point lies within r - delta of some center."""
    r = 0.1
    centers = greedy_cover_centers(segment_cloud, r)
    gaps = np.min(np.linalg.norm(segment_cloud.points[:, None, :] - centers.points[None, :, :], axis=2), axis=1)
    assert gaps.max() <= r - r / 10


def test_greedy_cover_rejects_coarse_target():
    with pytest.raises(DomainError):
        greedy_cover_centers(PointCloud([(0.0, 0.0)], density=0.05), 0.1)


def test_greedy_cover_accepts_density_rounded_above_delta():
    """Test that a density one ulp above delta, as float sums produce, is accepted."""
    target = PointCloud([(0.0, 0.0)], density=float(np.nextafter(0.01, 1.0)))
    centers = greedy_cover_centers(target, 0.1, SolverConfig(delta=0.01))
    assert len(centers) == 1


def test_connect_tree_examples():
    single = connect_tree(PointCloud([(1.0, 1.0)]))
    assert single.vertex_count == 1 and curve_length(single) == 0.0

    line = connect_tree(PointCloud([(0, 0), (2, 0), (1, 0)]))
    assert curve_length(line) == pytest.approx(2.0)
    assert is_tree(line)

    triangle = connect_tree(PointCloud([(0, 0), (1, 0), (0.5, np.sqrt(3) / 2)]))
    assert curve_length(triangle) == pytest.approx(2.0)


def test_prune_removes_dangling_branch(segment_cloud):
    tree = CurveGraph(vertices=[(0, 0), (1, 0), (1, 5)], edges=[(0, 1), (1, 2)])
    pruned = prune_loose_branches(tree, segment_cloud, 0.1)
    assert curve_length(pruned) == pytest.approx(1.0)
    assert covers(pruned, segment_cloud, 0.1).passed


def test_prune_keeps_tight_path(unit_segment):
    target = PointCloud([(0, 0), (1, 0)], density=0.0)
    pruned = prune_loose_branches(unit_segment, target, 0.1)
    assert curve_length(pruned) == pytest.approx(1.0)


def test_prune_rejects_cycle():
    loop = CurveGraph.path([(0, 0), (1, 0), (0, 1)], closed=True)
    with pytest.raises(GeometryError):
        prune_loose_branches(loop, PointCloud([(0, 0)]), 0.1)


def test_shortcut_replaces_detour():
    """Test the chord replacement: length 3, chord 1, saving 2."""
    detour = CurveGraph.path([(0, 0), (0, 1), (1, 1), (1, 0)])
    target = PointCloud([(0, 0), (1, 0)], density=0.0)
    result = shortcut_limbs(detour, target, 0.1)
    assert curve_length(result) == pytest.approx(1.0)
    assert covers(result, target, 0.1).passed


def test_shortcut_keeps_covering_limb():
    """Test that a shallow detour whose apex alone covers a target point survives."""
    detour = CurveGraph.path([(0, 0), (0.5, 0.3), (1, 0)])
    target = PointCloud([(0, 0), (1, 0), (0.5, 0.3)], density=0.0)
    result = shortcut_limbs(detour, target, 0.1)
    assert curve_length(result) == pytest.approx(curve_length(detour))


def test_shortcut_adds_stub_for_pocket():
    """Test that the chord plus one stub toward the pocket beats the detour."""
    detour = CurveGraph.path([(0, 0), (0, 1), (1, 1), (1, 0)])
    target = PointCloud([(0, 0), (1, 0), (0.5, 1.0)], density=0.0)
    result = shortcut_limbs(detour, target, 0.1)
    assert curve_length(result) == pytest.approx(1.9, abs=1e-6)
    assert is_tree(result)
    assert covers(result, target, 0.1).passed


def test_ball_cut_gate():
    assert ball_cut_gate(64)
    assert not ball_cut_gate(16)


def test_ball_cut_replaces_far_tangle():
    """Test that a zigzag far from the target is cut down to a circle."""
    r = 0.01
    zigzag = [(1.7 + 0.02 * i, 0.4 * (-1) ** i) for i in range(1, 31)]
    tree = CurveGraph.path([(0.0, 0.0), (1.5, 0.0), (1.7, 0.0)] + zigzag)
    target = PointCloud([(0.0, 0.0)], density=0.0)
    result = ball_cut(tree, target, r, SolverConfig())
    assert curve_length(result) < curve_length(tree)
    assert is_tree(result)
    assert covers(result, target, r).passed


def test_ball_cut_is_noop_near_target(unit_segment, segment_cloud):
    result = ball_cut(unit_segment, segment_cloud, 0.1)
    assert curve_length(result) == pytest.approx(1.0)


def test_ball_cut_keeps_edges_outside_the_ball():
    """Test a tangle entered by two branches: closing the ring must not drop the covering edge."""
    r = 1.0
    branch_a = [(250.0, 300.0)] + [(250.0 + j, 300.0 + 40.0 * (-1) ** j) for j in range(1, 21)]
    branch_b = [(250.0 - j, 300.0 + 40.0 * (-1) ** j) for j in range(1, 21)]
    vertices = [(0.0, 0.0), (500.0, 0.0)] + branch_a + branch_b
    first_b = 2 + len(branch_a)
    edges = [(0, 1), (0, 2)]
    edges += [(i, i + 1) for i in range(2, first_b - 1)]
    edges += [(1, first_b)] + [(i, i + 1) for i in range(first_b, len(vertices) - 1)]
    tree = CurveGraph(vertices=vertices, edges=edges)
    target = PointCloud(np.column_stack([np.linspace(0.0, 500.0, 5001), np.zeros(5001)]), density=0.05)
    assert covers(tree, target, r).passed

    result = ball_cut(tree, target, r, SolverConfig())
    assert is_tree(result)
    assert curve_length(result) <= curve_length(tree)
    assert covers(result, target, r).passed


def test_fermat_point_equilateral():
    a, b, c = np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.5, np.sqrt(3) / 2])
    assert np.allclose(fermat_point(a, b, c), (0.5, np.sqrt(3) / 6), atol=1e-9)


def test_fermat_point_obtuse_corner():
    a, b, c = np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([-1.0, 0.1])
    assert np.allclose(fermat_point(a, b, c), a)


def test_steiner_insertion_shortens_corner():
    """Test that two sides of a unit triangle become the Steiner star."""
    path = CurveGraph.path([(1, 0), (0, 0), (0.5, np.sqrt(3) / 2)])
    target = PointCloud([(0, 0), (1, 0), (0.5, np.sqrt(3) / 2)], density=0.0)
    result = insert_steiner_points(path, target, 0.01)
    assert curve_length(result) < 2.0
    assert curve_length(result) >= np.sqrt(3) - 3 * 0.01
    assert is_tree(result)
    assert covers(result, target, 0.01).passed


def test_vertex_descent_moves_star_center():
    """Test that an off-center star center moves toward the Fermat point."""
    leaves = [(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]
    star = CurveGraph(vertices=[(0.2, 0.1)] + leaves, edges=[(0, 1), (0, 2), (0, 3)])
    target = PointCloud(leaves, density=0.0)
    result = vertex_descent(star, target, 0.05)
    assert curve_length(result) < curve_length(star)
    assert covers(result, target, 0.05).passed


def test_solve_single_point():
    point = PointCloud([(0.0, 0.0)], density=0.0)
    for mode in TargetMode.ALL:
        solution = solve(point, 0.1, mode)
        assert solution.length == 0.0
        assert solution.certificate.passed


def test_solve_two_balls_set_mode(two_ball_union):
    """Test that the union of two unit balls 3 apart is covered by about the segment [a, b]."""
    solution = solve(two_ball_union, 1.0, TargetMode.SET)
    assert 3.0 <= solution.length <= 3.15
    assert solution.certificate.passed
    assert is_tree(solution.curve)
    assert solution.move_log[0].kind == MoveKind.INITIAL_TREE
    assert all(move.delta_length <= 0 for move in solution.move_log[1:])


@pytest.mark.slow
def test_solve_is_deterministic(two_ball_union):
    runs = [solve(two_ball_union, 1.0, TargetMode.SET, SolverConfig(seed=7)) for _ in range(3)]
    for other in runs[1:]:
        assert np.array_equal(other.curve.vertices, runs[0].curve.vertices)
        assert other.move_log == runs[0].move_log


@pytest.mark.parametrize("r", [0.1, 0.05])
def test_solve_segment_neighborhood(fine_segment_cloud, r):
    """Test Lambda = 1 for the unit segment: the solver finds a cover of length in [1, 1.05]."""
    solution = solve(fine_segment_cloud, r, TargetMode.NEIGHBORHOOD)
    assert 1.0 - 1e-6 <= solution.length <= 1.05
    assert solution.certificate.passed
    assert solution.length >= best_lower_bound(fine_segment_cloud, r).lower - 1e-6


def test_solve_domain_errors(segment_cloud):
    with pytest.raises(DomainError):
        solve(segment_cloud, 0.0)
    with pytest.raises(DomainError):
        solve(segment_cloud, 0.1, mode="ball")
    with pytest.raises(DomainError):
        solve(segment_cloud, 0.1, cfg=SolverConfig(delta=0.2))


def test_solution_serializes_curve():
    solution = solve(PointCloud([(0.0, 0.0), (0.5, 0.0)], density=0.0), 0.1, TargetMode.SET)
    dumped = solution.model_dump(by_alias=True)
    assert set(dumped["curve"]) >= {"vertices", "edges"}
    assert dumped["certificate"]["pass"] is True


def _steiner_oracle(points: np.ndarray, pitch: float) -> float:
    """Best of the minimum spanning path and every one-vertex star on a grid."""
    spanning = min(
        np.linalg.norm(points[i] - points[j]) + np.linalg.norm(points[j] - points[k])
        for i, j, k in itertools.permutations(range(3))
    )
    axis = np.arange(0.0, 1.0 + pitch / 2, pitch)
    grid = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    star = np.linalg.norm(grid[:, None, :] - points[None, :, :], axis=2).sum(axis=1).min()
    return float(min(spanning, star))


def test_solve_tiny_instance_against_oracle():
    """Test three grid points against brute-force visiting trees on a 21x21 grid."""
    points = np.array([(0.0, 0.0), (1.0, 0.0), (0.5, 0.75)])
    solution = solve(PointCloud(points, density=0.0), 0.05, TargetMode.SET)
    assert solution.length <= 1.02 * _steiner_oracle(points, 0.05)
    assert distances_to_curve(points, solution.curve).max() <= 0.05


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_solve_seeded_grid_instances_against_oracle(seed):
    """Test three distinct points of a 5x5 grid on [0,1]^2 against the brute-force oracle."""
    rng = np.random.default_rng(seed)
    picks = rng.choice(25, size=3, replace=False)
    points = np.array([(0.25 * (i % 5), 0.25 * (i // 5)) for i in picks])
    solution = solve(PointCloud(points, density=0.0), 0.05, TargetMode.SET, SolverConfig(seed=seed))
    assert solution.certificate.passed
    assert is_tree(solution.curve)
    assert solution.length <= 1.02 * _steiner_oracle(points, 0.05)
