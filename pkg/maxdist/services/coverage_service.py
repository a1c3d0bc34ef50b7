"""
Coverage Service

Certified checks that B(curve, r) contains a target set.

A target cloud with density delta certifies its underlying set: if every
sample lies within r - delta of the curve, every point of the set lies within
r of it (triangle inequality). Near-misses fail; callers shrink delta.
"""

import logging
from typing import Optional

from maxdist.core.config import GEOM_TOL
from maxdist.core.errors import CertificateError, DomainError, GeometryError
from maxdist.models.geometry import CurveGraph, PointCloud
from maxdist.schemas.coverage import CoverageCertificate
from maxdist.schemas.generators import SampleSpec
from maxdist.services.generator_service import neighborhood_cloud
from maxdist.services.geometry_service import deviation_with_witness, is_connected

logger = logging.getLogger(__name__)

# Default sampling density as a fraction of r
DEFAULT_DELTA_FRACTION = 0.1
# Absolute inward shell that keeps lattice samples clear of round-off at radius r - delta
SHELL_TOLERANCE = 10 * GEOM_TOL


def default_sample(r: float, seed: int = 0) -> SampleSpec:
    return SampleSpec(delta=DEFAULT_DELTA_FRACTION * r, seed=seed)


def covers(graph: CurveGraph, target: PointCloud, r: float) -> CoverageCertificate:
    """
    Certify B(graph, r) ⊇ underlying set of `target`.

    Args:
        graph: Connected candidate curve
        target: Sample with its certified density (None counts as 0)
        r: Neighborhood radius

    Returns:
        Certificate; `passed` iff worst_distance <= r - delta

    Raises:
        DomainError: delta >= r
        GeometryError: empty target, empty or disconnected graph
    """
    delta = target.density or 0.0
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    if delta >= r:
        raise DomainError(f"density {delta} >= r={r}: no certificate is possible")
    target.require_non_empty("coverage target")
    if not is_connected(graph):
        raise GeometryError("candidate curve must be connected")
    worst, witness = deviation_with_witness(target, graph)
    certificate = CoverageCertificate.build(r=r, delta=delta, worst_distance=worst, worst_point=witness)
    logger.debug(
        f"Coverage r={r} delta={delta}: worst={worst:.6g} margin={certificate.margin:.3g} pass={certificate.passed}"
    )
    return certificate


def neighborhood_target(cloud: PointCloud, r: float, sample: Optional[SampleSpec] = None) -> PointCloud:
    """
    Sample of B(E, r) ready for `covers` at radius r.

    The lattice fills balls of radius r - delta_total (minus a round-off
    shell), with delta_total = delta_E + sample.delta. A passing certificate
    then shows B(E, r - delta_total) ⊆ B(curve, r): the containment holds up
    to an inward shell of width delta_total, which is what lets tight covers
    such as E ⊆ curve pass.

    Raises:
        DomainError: sample.delta >= r/2 or delta_total >= r
    """
    sample = sample or default_sample(r)
    if not 0 < sample.delta < r / 2:
        raise DomainError(f"need 0 < delta < r/2, got delta={sample.delta}, r={r}")
    total = (cloud.density or 0.0) + sample.delta
    fill_radius = r - total - SHELL_TOLERANCE
    if fill_radius <= sample.delta:
        raise DomainError(f"density {total} leaves no room inside r={r}")
    filled = neighborhood_cloud(cloud, fill_radius, sample)
    return filled.with_density(total)


def covers_neighborhood(
    graph: CurveGraph,
    cloud: PointCloud,
    r: float,
    sample: Optional[SampleSpec] = None,
) -> CoverageCertificate:
    """
    Certify that B(graph, r) contains the r-neighborhood of the cloud's set.

    See `neighborhood_target` for what a pass guarantees.
    """
    return covers(graph, neighborhood_target(cloud, r, sample), r)


def require_pass(certificate: CoverageCertificate, what: str) -> CoverageCertificate:
    """Raise CertificateError unless the certificate passed."""
    if not certificate.passed:
        raise CertificateError(
            f"{what}: coverage failed at r={certificate.r} "
            f"(worst distance {certificate.worst_distance:.6g} at {certificate.worst_point})",
            certificate=certificate,
        )
    return certificate

