"""
Bounds Service

Scale arithmetic (k_r, r', k_eta) and certified lower bounds for Lambda.

Lower bounds are unconditional. The packing bound follows this chain: N cloud
points pairwise at least d apart force N curve points pairwise at least
d - 2r apart; any connected set through N points is at least half as long as
their minimum spanning tree; that tree has N - 1 edges of length >= d - 2r.
"""

import itertools
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from maxdist.core.errors import DomainError
from maxdist.models.geometry import PointCloud
from maxdist.models.tags import BoundMethod, TargetMode
from maxdist.schemas.bounds import BoundsRecord, MethodValue, PackingWitness, ScaleIndex
from maxdist.services.geometry_service import diameter

logger = logging.getLogger(__name__)

_SCALE_RTOL = 1e-12
# Relative slack on the separation test; the bound itself uses the realized separation
_SEPARATION_RTOL = 1e-12

PACKING_SWEEP = "sweep"
PACKING_FARTHEST = "farthest"


def scale_index(r: float) -> ScaleIndex:
    """
    Smallest positive k with 3^k r >= 1/3, and r' = 3^k r in [1/3, 1).

    Raises:
        DomainError: r outside (0, 1/3)
    """
    if not 0 < r < 1 / 3:
        raise DomainError(f"scale_index needs 0 < r < 1/3, got {r}")
    threshold = (1 / 3) * (1 - _SCALE_RTOL)
    k = max(1, math.ceil(math.log(1 / (3 * r)) / math.log(3)))
    while 3.0 ** k * r < threshold:
        k += 1
    while k > 1 and 3.0 ** (k - 1) * r >= threshold:
        k -= 1
    r_prime = max(3.0 ** k * r, 1 / 3)
    return ScaleIndex(k=k, r_prime=r_prime)


def continuous_scale_index(r: float) -> float:
    """log_3(1 / (3r)): the scale index before rounding up."""
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    return math.log(1 / (3 * r)) / math.log(3)


def appropriate_scale(eta: float, r: float) -> float:
    """
    r-appropriate scale k_eta(r) = -log_{2^eta}(r), so that 2^(-eta k) = r.

    Raises:
        DomainError: eta <= 0 or r outside (0, 1)
    """
    if eta <= 0:
        raise DomainError(f"eta must be positive, got {eta}")
    if not 0 < r < 1:
        raise DomainError(f"appropriate_scale needs 0 < r < 1, got {r}")
    return -math.log(r) / (eta * math.log(2))


def diameter_lower_bound(cloud: PointCloud, r: float) -> float:
    """Lambda(B(E, r), r) >= diam(E) >= diam(cloud) for every r > 0."""
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    return diameter(cloud)


def set_diameter_lower_bound(cloud: PointCloud, r: float) -> float:
    """
    Lambda(E, r) >= diam(E) - 2r: a curve within r of two diametral points
    contains two points at least diam(E) - 2r apart.
    """
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    return max(0.0, diameter(cloud) - 2 * r)


def _sweep_packing(points: np.ndarray, d: float) -> np.ndarray:
    """Scan points in lexicographic order, keeping each one at least d from all kept."""
    order = np.lexsort(points.T[::-1]).tolist()
    cutoff = d * (1 - _SEPARATION_RTOL)
    coords = points.tolist()
    keys = [tuple(key) for key in np.floor(points / d).astype(np.int64).tolist()]
    neighbors = list(itertools.product((-1, 0, 1), repeat=points.shape[1]))
    cells: Dict[Tuple[int, ...], List[int]] = {}
    kept: List[int] = []
    for index in order:
        point, key = coords[index], keys[index]
        clear = all(
            math.dist(coords[other], point) >= cutoff
            for offset in neighbors
            for other in cells.get(tuple(k + o for k, o in zip(key, offset)), ())
        )
        if clear:
            kept.append(index)
            cells.setdefault(key, []).append(index)
    return np.asarray(kept, dtype=np.int64)


def _farthest_packing(points: np.ndarray, d: float) -> np.ndarray:
    """Farthest-point sampling from the lexicographic minimum, stopping below d."""
    cutoff = d * (1 - _SEPARATION_RTOL)
    order = np.lexsort(points.T[::-1])
    ranked = points[order]
    selected = [0]
    nearest = np.linalg.norm(ranked - ranked[0], axis=1)
    while True:
        # argmax returns the first maximum, i.e. the lexicographically lowest
        candidate = int(np.argmax(nearest))
        if nearest[candidate] < cutoff:
            break
        selected.append(candidate)
        nearest = np.minimum(nearest, np.linalg.norm(ranked - ranked[candidate], axis=1))
    return order[np.asarray(selected, dtype=np.int64)]


def min_pairwise_distance(points: np.ndarray) -> Optional[float]:
    if len(points) < 2:
        return None
    distances, _ = cKDTree(points).query(points, k=2)
    return float(distances[:, 1].min())


def greedy_packing(cloud: PointCloud, d: float, strategy: str = PACKING_SWEEP) -> PackingWitness:
    """
    Maximal subset of the cloud with pairwise separation >= d.

    Args:
        cloud: Points to pack
        d: Separation
        strategy: "sweep" (lexicographic scan) or "farthest" (farthest-point order)
    """
    cloud.require_non_empty()
    if d <= 0:
        raise DomainError(f"separation must be positive, got {d}")
    if strategy == PACKING_SWEEP:
        chosen = _sweep_packing(cloud.points, d)
    elif strategy == PACKING_FARTHEST:
        chosen = _farthest_packing(cloud.points, d)
    else:
        raise DomainError(f"unknown packing strategy {strategy!r}")
    points = cloud.points[np.sort(chosen)]
    return PackingWitness(separation=d, points=points.tolist(), min_pairwise=min_pairwise_distance(points))


def packing_value(witness: PackingWitness, r: float) -> float:
    """(N - 1)(s - 2r)/2 with s the smaller of d and the realized separation."""
    if witness.size < 2:
        return 0.0
    separation = min(witness.separation, witness.min_pairwise)
    return max(0.0, (witness.size - 1) * (separation - 2 * r) / 2)


def packing_lower_bound(
    cloud: PointCloud,
    r: float,
    d: float,
    strategy: str = PACKING_SWEEP,
) -> Tuple[float, PackingWitness]:
    """
    Packing lower bound on the length of any connected curve whose
    r-neighborhood covers the cloud.

    Returns:
        (bound, witness)

    Raises:
        DomainError: d <= 2r
    """
    if d <= 2 * r:
        raise DomainError(f"separation d={d} must exceed 2r={2 * r}")
    witness = greedy_packing(cloud, d, strategy)
    bound = packing_value(witness, r)
    logger.debug(f"Packing d={d:.4g} r={r:.4g}: N={witness.size} bound={bound:.6g}")
    return bound, witness


def default_separation_grid(cloud: PointCloud, r: float) -> List[float]:
    """{4r, 8r, 16r, ...} up to diam(cloud)."""
    limit = diameter(cloud)
    grid = []
    d = 4 * r
    while d <= limit:
        grid.append(d)
        d *= 2
    return grid


def best_lower_bound(
    cloud: PointCloud,
    r: float,
    d_grid: Optional[Iterable[float]] = None,
    mode: str = TargetMode.NEIGHBORHOOD,
    strategies: Sequence[str] = (PACKING_SWEEP, PACKING_FARTHEST),
) -> BoundsRecord:
    """
    Largest certified lower bound over the diameter bound and packings on a
    grid of separations (every requested packing strategy).

    In set mode the diameter bound becomes diam - 2r.
    """
    if mode not in TargetMode.ALL:
        raise DomainError(f"unknown mode {mode!r}")
    grid = list(d_grid) if d_grid is not None else default_separation_grid(cloud, r)
    if any(d <= 2 * r for d in grid):
        raise DomainError("every separation in the grid must exceed 2r")

    if mode == TargetMode.SET:
        candidates = {BoundMethod.SET_DIAMETER: (set_diameter_lower_bound(cloud, r), None)}
    else:
        candidates = {BoundMethod.DIAMETER: (diameter_lower_bound(cloud, r), None)}

    best_packing: Tuple[float, Optional[PackingWitness]] = (0.0, None)
    for d in grid:
        for strategy in strategies:
            bound, witness = packing_lower_bound(cloud, r, d, strategy)
            if bound > best_packing[0]:
                best_packing = (bound, witness)
    candidates[BoundMethod.PACKING] = best_packing

    method, (lower, witness) = max(candidates.items(), key=lambda item: item[1][0])
    return BoundsRecord(
        r=r,
        lower=lower,
        lower_method=method,
        methods={tag: MethodValue(value=value) for tag, (value, _) in candidates.items()},
        witness=witness,
    )
