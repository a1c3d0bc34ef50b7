"""
Tests for constructive covers: unit rectangle, rectangle chain, Hölder
circle covers and circle families in R^n.
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from maxdist.core.errors import DomainError
from maxdist.models.tags import BoundMethod
from maxdist.schemas.covers import CoverReport
from maxdist.services import experiment_service
from maxdist.services.cover_service import (
    UNIT_COVER_BOUND,
    circle_centers_spacing,
    circle_family,
    circle_partition_size,
    estimate_holder_constant,
    holder_circle_cover,
    koch_holder_bound,
    rectangle_chain,
    rectangle_cover_length,
    rn_circle_family,
    snowflake_rectangle_cover,
    unit_scale_report,
)
from maxdist.services.generator_service import koch_sampler
from maxdist.services.geometry_service import curve_length, is_connected


@pytest.mark.parametrize("r", [1 / 3, 0.5, 0.9])
def test_unit_scale_report(r):
    """Test the unit rectangle certificate on [1/3, 1)."""
    report = unit_scale_report(r)
    assert report.length == pytest.approx(8 / 3)
    assert report.length <= report.theoretical_bound == 3.0
    assert report.certificate.passed
    assert report.method == BoundMethod.UNIT_RECTANGLE


@pytest.mark.parametrize("r", [0.2, 1.0])
def test_unit_scale_report_domain(r):
    with pytest.raises(DomainError):
        unit_scale_report(r)


def test_rectangle_chain_structure():
    chain = rectangle_chain(2)
    assert chain.vertex_count == 3 * 16 + 1
    assert chain.edge_count == 4 * 16
    assert is_connected(chain)
    assert curve_length(chain) == pytest.approx(rectangle_cover_length(2))


def test_snowflake_rectangle_cover_length():
    """Test the worked example: r = 0.1 needs 16 rectangles of total length 128/27."""
    report = snowflake_rectangle_cover(0.1)
    assert report.pieces == 16
    assert report.length == pytest.approx(128 / 27, rel=1e-12)
    assert report.certificate.passed
    assert report.length <= report.theoretical_bound


def test_snowflake_rectangle_cover_direct_certificate():
    """Test the assembled cover against a sample of the whole neighborhood."""
    report = snowflake_rectangle_cover(0.2, direct=True)
    assert report.pieces == 4
    assert report.length == pytest.approx(32 / 9)
    assert report.certificate.passed
    assert report.certificate.r == 0.2


@pytest.mark.parametrize("r", [0.0, 1 / 3])
def test_snowflake_rectangle_cover_domain(r):
    with pytest.raises(DomainError):
        snowflake_rectangle_cover(r)


def test_circle_partition_size_segment():
    assert circle_partition_size(1.0, 1.0, 0.1) == 100


@pytest.mark.parametrize("r", [0.1, 0.05, 0.025, 0.0125])
def test_segment_circle_cover_spacing(r):
    """Test that consecutive circle centers on the segment are at most r/10 apart."""
    instance = experiment_service.get_instance("segment")
    report = holder_circle_cover(instance.sampler, 1.0, 1.0, r, target=instance.cloud(r / 40))
    assert report.certificate.passed
    spacing = circle_centers_spacing(report)
    assert spacing.max() <= r / 10 + 1e-12
    # Centers at i/N for i < N: the connectors sum to 1 - 1/N
    assert report.exact_length == pytest.approx(report.pieces * math.pi * r + (report.pieces - 1) / report.pieces)
    assert report.length <= report.exact_length
    assert report.length <= report.theoretical_bound


@pytest.mark.parametrize("r, circles", [(0.1, 100), (0.01, 1000)])
def test_holder_circle_cover_one_circle_per_step(r, circles):
    instance = experiment_service.get_instance("segment")
    report = holder_circle_cover(instance.sampler, 1.0, 1.0, r, target=instance.cloud(r / 40))
    assert report.pieces == circles
    # Each polygon has as many edges as vertices, plus N - 1 connectors
    assert report.curve.edge_count == report.curve.vertex_count + circles - 1
    assert is_connected(report.curve)


def test_holder_circle_cover_rejects_wrong_constant():
    """Test that a constant below the sampler's true one is refused."""
    segment = experiment_service.get_instance("segment").sampler
    stretched = lambda t: 50 * segment(t)
    with pytest.raises(DomainError, match="Hölder constant"):
        holder_circle_cover(stretched, 1.0, 1.0, 0.1)


def test_cover_report_rejects_length_above_bound():
    report = unit_scale_report(0.5)
    with pytest.raises(ValidationError, match="exceeds its bound"):
        CoverReport(
            curve=report.curve,
            length=3.5,
            theoretical_bound=UNIT_COVER_BOUND,
            certificate=report.certificate,
            method=report.method,
            pieces=1,
        )


def test_koch_circle_cover_spacing():
    instance = experiment_service.get_instance("koch")
    c_gamma = experiment_service.holder_constant("koch")
    report = holder_circle_cover(instance.sampler, instance.alpha, c_gamma, 0.1, target=instance.cloud(0.1 / 40))
    assert report.certificate.passed
    assert circle_centers_spacing(report).max() <= 0.1 / 10
    assert report.length <= report.theoretical_bound
    assert report.length_constant > 0


def test_koch_holder_bound_dominates_finer_estimate():
    """Test that the certified constant is above the estimate on a finer grid."""
    bound = koch_holder_bound(depth=5)
    assert bound >= estimate_holder_constant(koch_sampler, experiment_service.KOCH_ALPHA, depth=6)
    assert bound >= estimate_holder_constant(koch_sampler, experiment_service.KOCH_ALPHA, depth=5)
    assert experiment_service.holder_constant("koch") == bound


@pytest.mark.parametrize("r", experiment_service.radii_pow3(2, 6))
def test_koch_circle_centers_within_tenth_of_r(r):
    """Test the center spacing at every radius of the slope sweep."""
    c_gamma = experiment_service.holder_constant("koch")
    steps = circle_partition_size(experiment_service.KOCH_ALPHA, c_gamma, r)
    centers = koch_sampler(np.arange(steps) / steps)
    assert np.linalg.norm(np.diff(centers, axis=0), axis=1).max() <= r / 10


def test_holder_circle_cover_domain():
    sampler = experiment_service.get_instance("segment").sampler
    with pytest.raises(DomainError):
        holder_circle_cover(sampler, 1.5, 1.0, 0.1)
    with pytest.raises(DomainError):
        holder_circle_cover(sampler, 1.0, 0.5, 0.1)
    with pytest.raises(DomainError):
        holder_circle_cover(sampler, 1.0, 1.0, 1.0)


def test_estimate_holder_constant_segment():
    sampler = experiment_service.get_instance("segment").sampler
    assert estimate_holder_constant(sampler, 1.0, depth=3) == pytest.approx(1.0)


@pytest.mark.slow
def test_koch_circle_cover_slope():
    """Test that the circle cover length follows r^(1 - log_3 4) for r = 3^-3..3^-7."""
    run = experiment_service.scaling_sweep("koch", experiment_service.radii_pow3(2, 6), [BoundMethod.CIRCLE_COVER])
    assert all(record.methods[BoundMethod.CIRCLE_COVER].error is None for record in run.records)
    fit = experiment_service.fit_exponent(run, BoundMethod.CIRCLE_COVER)
    assert fit.slope == pytest.approx(experiment_service.KOCH_SLOPE, abs=0.05)


def test_rn_circle_family_in_r3():
    """Test the eps = pi/8 family around the unit ball in R^3."""
    report = rn_circle_family(3, 1.0, math.pi / 8)
    assert report.passed
    assert report.size == 8
    assert report.max_distance <= 1.0
    assert all(circle.radius == 0.5 for circle in report.circles)


@pytest.mark.parametrize("r", [0.25, 3.0])
def test_rn_circle_family_scales_with_r(r):
    """Test that the family at r is the unit family scaled by r."""
    unit = rn_circle_family(3, 1.0, math.pi / 8)
    scaled = rn_circle_family(3, r, math.pi / 8)
    assert scaled.size == unit.size
    assert scaled.passed == unit.passed
    assert scaled.max_distance == pytest.approx(r * unit.max_distance, rel=1e-9)
    for small, big in zip(unit.circles, scaled.circles):
        assert big.radius == pytest.approx(r * small.radius)
        assert np.allclose(big.basis, small.basis)


def test_rn_circle_family_in_plane():
    report = rn_circle_family(2, 0.5, math.pi / 8, samples=2000)
    assert report.passed
    assert report.size == 1


def test_circle_family_planes_are_orthonormal():
    for circle in circle_family(3, 1.0, math.pi / 16):
        basis = np.asarray(circle.basis)
        assert np.allclose(basis @ basis.T, np.eye(2))


def test_rn_circle_family_domain():
    with pytest.raises(DomainError):
        rn_circle_family(4, 1.0, math.pi / 8)
    with pytest.raises(DomainError):
        rn_circle_family(3, 1.0, math.pi / 4)
    with pytest.raises(DomainError):
        rn_circle_family(3, 0.0, math.pi / 8)
