"""
Shared pytest fixtures for all test modules.
"""
import os
import sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

import pytest
from click.testing import CliRunner

from maxdist.models.geometry import CurveGraph, PointCloud
from maxdist.schemas.generators import KochSpec, SampleSpec
from maxdist.services.generator_service import koch_cloud, koch_curve, segment_set, two_points_set


@pytest.fixture
def runner():
    """Click runner for invoking the CLI in-process."""
    return CliRunner()


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Point MAXDIST_OUTPUT_DIR at a fresh temporary directory."""
    monkeypatch.setenv("MAXDIST_OUTPUT_DIR", str(tmp_path))
    return tmp_path


@pytest.fixture
def unit_segment() -> CurveGraph:
    return CurveGraph.path([(0.0, 0.0), (1.0, 0.0)])


@pytest.fixture
def segment_cloud() -> PointCloud:
    """Unit segment sampled every 0.01 (density 0.005)."""
    cloud, _ = segment_set((0.0, 0.0), (1.0, 0.0), 0.01)
    return cloud


@pytest.fixture
def two_ball_cloud() -> PointCloud:
    """The pair a=(0,0), b=(3,0)."""
    cloud, _ = two_points_set((0.0, 0.0), (3.0, 0.0))
    return cloud


@pytest.fixture
def koch_cloud_depth4() -> PointCloud:
    """Depth-4 Koch vertices (257 points)."""
    return koch_cloud(KochSpec(depth=4), SampleSpec(delta=1.0))


@pytest.fixture
def koch_polyline_depth2() -> CurveGraph:
    return koch_curve(KochSpec(depth=2))
