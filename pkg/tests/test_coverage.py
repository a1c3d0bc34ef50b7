"""
Tests for certified coverage checks.
"""
import numpy as np
import pytest
from pydantic import ValidationError

from maxdist.core.errors import CertificateError, DomainError, GeometryError
from maxdist.models.geometry import CurveGraph, PointCloud
from maxdist.schemas.coverage import CoverageCertificate
from maxdist.schemas.generators import KochSpec, SampleSpec
from maxdist.services.coverage_service import (
    covers,
    covers_neighborhood,
    neighborhood_target,
    require_pass,
)
from maxdist.services.generator_service import koch_cloud
from maxdist.services.geometry_service import one_sided_deviation


def test_covers_single_target(unit_segment):
    """Test the worked example: one point 0.05 above the segment."""
    target = PointCloud([(0.5, 0.05)], density=0.01)
    certificate = covers(unit_segment, target, 0.1)
    assert certificate.passed
    assert certificate.worst_distance == pytest.approx(0.05)
    assert certificate.margin == pytest.approx(0.04)
    assert certificate.worst_point == pytest.approx([0.5, 0.05])


def test_covers_fails_outside(unit_segment):
    target = PointCloud([(0.5, 0.095)], density=0.01)
    certificate = covers(unit_segment, target, 0.1)
    assert not certificate.passed
    assert certificate.margin < 0
    with pytest.raises(CertificateError) as exc_info:
        require_pass(certificate, "segment")
    assert exc_info.value.certificate is certificate
    assert exc_info.value.exit_code == 3


def test_covers_domain_errors(unit_segment):
    target = PointCloud([(0.0, 0.0)], density=0.2)
    with pytest.raises(DomainError):
        covers(unit_segment, target, 0.1)
    with pytest.raises(GeometryError):
        covers(unit_segment, PointCloud(np.zeros((0, 2))), 0.1)
    split = CurveGraph(vertices=[(0, 0), (1, 0), (2, 0), (3, 0)], edges=[(0, 1), (2, 3)])
    with pytest.raises(GeometryError):
        covers(split, PointCloud([(0.0, 0.0)]), 0.1)


def test_covers_neighborhood_of_itself(unit_segment, segment_cloud):
    """Test that a segment covers the r-neighborhood of its own samples."""
    certificate = covers_neighborhood(unit_segment, segment_cloud, 0.1)
    assert certificate.passed
    assert certificate.delta == pytest.approx(segment_cloud.density + 0.01)


def test_neighborhood_target_domain(segment_cloud):
    with pytest.raises(DomainError):
        neighborhood_target(segment_cloud, 0.1, SampleSpec(delta=0.05))
    with pytest.raises(DomainError):
        neighborhood_target(PointCloud([(0, 0)], density=0.09), 0.1, SampleSpec(delta=0.01))


def test_coverage_certificate_is_sound(koch_polyline_depth2):
    """Test that a passing certificate holds against a much finer sample of the set."""
    r = 0.1
    coarse = koch_cloud(KochSpec(depth=0), SampleSpec(delta=0.05))
    certificate = covers(koch_polyline_depth2, coarse, r)
    assert certificate.passed
    fine = koch_cloud(KochSpec(depth=5), SampleSpec(delta=1.0))
    assert one_sided_deviation(fine, koch_polyline_depth2) <= r


def test_coverage_certificate_serializes_pass_alias(unit_segment):
    certificate = covers(unit_segment, PointCloud([(0.5, 0.05)], density=0.01), 0.1)
    dumped = certificate.model_dump(by_alias=True)
    assert dumped["pass"] is True
    assert "passed" not in dumped
    assert CoverageCertificate.model_validate(dumped) == certificate


def test_coverage_certificate_rejects_inconsistent_margin():
    with pytest.raises(ValidationError):
        CoverageCertificate(passed=True, r=0.1, delta=0.01, worst_distance=0.05, worst_point=[0, 0], margin=0.5)
    with pytest.raises(ValidationError):
        CoverageCertificate(passed=False, r=0.1, delta=0.01, worst_distance=0.05, worst_point=[0, 0], margin=0.1 - 0.01 - 0.05)


def _strip_cloud(height: float, seed: int) -> PointCloud:
    rng = np.random.default_rng(seed)
    points = np.column_stack([rng.uniform(0.0, 1.0, 200), rng.uniform(-height, height, 200)])
    return PointCloud(points, density=0.005)


def test_covers_anti_monotone_in_r(unit_segment):
    """Test that a pass at r stays a pass at every larger r."""
    target = _strip_cloud(0.2, seed=3)
    passed = [covers(unit_segment, target, r).passed for r in np.linspace(0.05, 0.5, 40)]
    assert not passed[0]
    first = passed.index(True)
    assert all(passed[first:])


def test_covers_monotone_in_curve(unit_segment):
    """Test that adding an edge never turns a pass into a fail."""
    target = _strip_cloud(0.3, seed=5)
    branched = CurveGraph(vertices=[(0.0, 0.0), (1.0, 0.0), (0.5, 0.3)], edges=[(0, 1), (0, 2)])
    for r in np.linspace(0.05, 0.5, 40):
        base, more = covers(unit_segment, target, r), covers(branched, target, r)
        assert more.worst_distance <= base.worst_distance + 1e-12
        assert more.passed or not base.passed
