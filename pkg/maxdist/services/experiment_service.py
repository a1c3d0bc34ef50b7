"""
Experiment Service

Scaling sweeps over radii, power-law fits of the resulting values and
convergence studies of the solver against its input set.
"""

import functools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError
from tqdm import tqdm

from maxdist.core.errors import CertificateError, DomainError, MaxDistError
from maxdist.models.geometry import PointCloud
from maxdist.models.tags import BoundMethod, TargetMode
from maxdist.schemas.bounds import BoundsRecord, MethodValue
from maxdist.schemas.experiments import ConvergenceRow, ConvergenceTable, FitResult, ScalingRun
from maxdist.schemas.generators import KochSpec, SampleSpec
from maxdist.schemas.solver import SolverConfig
from maxdist.services import bounds_service, cover_service, solver_service
from maxdist.services.generator_service import circle_set, koch_cloud, koch_sampler, segment_set
from maxdist.services.geometry_service import hausdorff_distance

logger = logging.getLogger(__name__)

KOCH_ALPHA = math.log(3) / math.log(4)
# (alpha - 1) / alpha = 1 - log_3 4
KOCH_SLOPE = 1 - math.log(4) / math.log(3)

UPPER_METHODS = (BoundMethod.RECT_COVER, BoundMethod.CIRCLE_COVER, BoundMethod.SOLVER)
# Summary columns a fit can use besides the per-method tags
SUMMARY_LOWER = "lower"
SUMMARY_UPPER = "upper"


def _segment_sampler(t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.column_stack([t, np.zeros_like(t)])


def _circle_sampler(t) -> np.ndarray:
    angle = 2 * math.pi * np.atleast_1d(np.asarray(t, dtype=float))
    return np.column_stack([np.cos(angle), np.sin(angle)])


@dataclass(frozen=True)
class Instance:
    """A test set with its sampler and Hölder data."""

    name: str
    cloud: Callable[[float], PointCloud]
    sampler: Callable
    alpha: float
    reference_slope: float
    holder_constant: Optional[float] = None
    # Certified upper bound on the constant, used when none is supplied
    holder_bound: Optional[Callable[[], float]] = None


INSTANCES: Dict[str, Instance] = {
    "koch": Instance(
        name="koch",
        cloud=lambda delta: koch_cloud(KochSpec(depth=0), SampleSpec(delta=delta)),
        sampler=koch_sampler,
        alpha=KOCH_ALPHA,
        reference_slope=KOCH_SLOPE,
        holder_bound=cover_service.koch_holder_bound,
    ),
    "segment": Instance(
        name="segment",
        cloud=lambda delta: segment_set((0.0, 0.0), (1.0, 0.0), delta)[0],
        sampler=_segment_sampler,
        alpha=1.0,
        reference_slope=0.0,
        holder_constant=1.0,
    ),
    "circle": Instance(
        name="circle",
        cloud=lambda delta: circle_set((0.0, 0.0), 1.0, delta)[0],
        sampler=_circle_sampler,
        alpha=1.0,
        reference_slope=0.0,
        holder_constant=2 * math.pi,
    ),
}


def get_instance(name: str) -> Instance:
    try:
        return INSTANCES[name]
    except KeyError:
        raise DomainError(f"unknown instance {name!r}; choose from {sorted(INSTANCES)}") from None


@functools.lru_cache(maxsize=None)
def holder_constant(name: str) -> float:
    """Supplied constant, the certified bound, or else the grid estimate (never below 1)."""
    instance = get_instance(name)
    if instance.holder_constant is not None:
        return instance.holder_constant
    if instance.holder_bound is not None:
        return max(1.0, instance.holder_bound())
    return max(1.0, cover_service.estimate_holder_constant(instance.sampler, instance.alpha))


def radii_pow3(first: int, last: int) -> List[float]:
    """3^-m / 3 for m = first..last: k_r = m exactly."""
    return [3.0 ** -m / 3 for m in range(first, last + 1)]


def radii_pow2(first: int, last: int) -> List[float]:
    return [2.0 ** -m for m in range(first, last + 1)]


def _check_radii(radii: Sequence[float]) -> List[float]:
    radii = [float(r) for r in radii]
    if not radii:
        raise DomainError("at least one radius is required")
    if any(r <= 0 for r in radii):
        raise DomainError("radii must be positive")
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly decreasing")
    return radii


def lower_bounds(instance: Instance, r: float, mode: str = TargetMode.NEIGHBORHOOD) -> BoundsRecord:
    """
    Best certified lower bound at r. The Koch instance packs depth-(k_r + 1)
    vertices at the copy scale 3^(1 - k_r); other instances use the default grid.
    """
    if instance.name == "koch" and r < 1 / 3:
        scale = bounds_service.scale_index(r)
        cloud = koch_cloud(KochSpec(depth=scale.k + 1), SampleSpec(delta=r))
        return bounds_service.best_lower_bound(
            cloud, r, [3.0 ** (1 - scale.k)], mode, strategies=(bounds_service.PACKING_SWEEP,)
        )
    return bounds_service.best_lower_bound(instance.cloud(r / 10), r, mode=mode)


def upper_value(
    instance: Instance,
    method: str,
    r: float,
    mode: str = TargetMode.NEIGHBORHOOD,
    cfg: Optional[SolverConfig] = None,
) -> Tuple[float, float]:
    """
    (length, certificate margin) of one verified cover.

    Raises:
        DomainError: method not applicable at r or to the instance
        CertificateError: the cover failed its certificate
    """
    if method == BoundMethod.RECT_COVER:
        if instance.name != "koch":
            raise DomainError("rect_cover applies to the koch instance only")
        report = cover_service.unit_scale_report(r) if r >= 1 / 3 else cover_service.snowflake_rectangle_cover(r)
        return report.length, report.certificate.margin
    if method == BoundMethod.CIRCLE_COVER:
        report = cover_service.holder_circle_cover(
            instance.sampler,
            instance.alpha,
            holder_constant(instance.name),
            r,
            target=instance.cloud(r / 40),
        )
        return report.length, report.certificate.margin
    if method == BoundMethod.SOLVER:
        solution = solver_service.solve(instance.cloud(r / 40), r, mode, cfg)
        return solution.length, solution.certificate.margin
    raise DomainError(f"unknown upper-bound method {method!r}")


def _sweep_record(instance: Instance, r: float, methods: Sequence[str], mode: str, cfg: Optional[SolverConfig]) -> BoundsRecord:
    values: Dict[str, MethodValue] = {}
    lower = lower_method = witness = None
    for method in methods:
        try:
            if method == BoundMethod.LOWER:
                bounds = lower_bounds(instance, r, mode)
                values.update(bounds.methods)
                lower, lower_method, witness = bounds.lower, bounds.lower_method, bounds.witness
            else:
                length, margin = upper_value(instance, method, r, mode, cfg)
                values[method] = MethodValue(value=length, certificate_margin=margin)
        except MaxDistError as exc:
            logger.warning(f"{instance.name} r={r:.6g} {method}: {exc.detail}")
            values[method] = MethodValue(error=exc.detail, exit_code=exc.exit_code)

    uppers = [(values[m].value, m) for m in UPPER_METHODS if m in values and values[m].value is not None]
    upper, upper_method = min(uppers) if uppers else (None, None)
    try:
        return BoundsRecord(
            r=r,
            lower=lower,
            lower_method=lower_method,
            upper=upper,
            upper_method=upper_method,
            methods=values,
            witness=witness,
        )
    except ValidationError:
        # A lower bound above a verified cover means one of the two certificates is wrong
        detail = f"lower bound {lower} ({lower_method}) exceeds upper bound {upper} ({upper_method})"
        logger.error(f"{instance.name} r={r:.6g}: {detail}")
        for method in (lower_method, upper_method):
            if method in values:
                values[method] = values[method].model_copy(
                    update={"error": detail, "exit_code": CertificateError.exit_code}
                )
        return BoundsRecord(r=r, methods=values, witness=witness)


def scaling_sweep(
    instance: str,
    radii: Sequence[float],
    methods: Sequence[str],
    mode: str = TargetMode.NEIGHBORHOOD,
    cfg: Optional[SolverConfig] = None,
    progress: bool = False,
) -> ScalingRun:
    """
    Run the selected bounds and covers at every radius.

    Per-method failures are stored in the record and the sweep continues.

    Raises:
        DomainError: unknown instance, method or mode, or radii not strictly decreasing
    """
    spec = get_instance(instance)
    radii = _check_radii(radii)
    unknown = [m for m in methods if m not in BoundMethod.SWEEP_METHODS]
    if unknown or not methods:
        raise DomainError(f"methods must be a non-empty subset of {list(BoundMethod.SWEEP_METHODS)}, got {list(methods)}")
    if mode not in TargetMode.ALL:
        raise DomainError(f"unknown mode {mode!r}")

    records = []
    for r in tqdm(radii, desc=f"scaling {instance}", disable=not progress):
        records.append(_sweep_record(spec, r, methods, mode, cfg))
        logger.info(f"Sweep {instance} r={r:.6g}: lower={records[-1].lower} upper={records[-1].upper}")
    return ScalingRun(
        instance=instance,
        mode=mode,
        methods=list(methods),
        radii=radii,
        records=records,
        reference_slope=spec.reference_slope,
    )


def method_values(run: ScalingRun, method: str) -> List[Tuple[float, float]]:
    """(r, value) pairs for a method tag, or for the "lower"/"upper" summaries."""
    pairs = []
    for record in run.records:
        if method == SUMMARY_LOWER:
            value = record.lower
        elif method == SUMMARY_UPPER:
            value = record.upper
        else:
            entry = record.methods.get(method)
            value = entry.value if entry else None
        if value is not None:
            pairs.append((record.r, value))
    return pairs


def fit_exponent(run: ScalingRun, method: str) -> FitResult:
    """
    Least squares of log(value) on log(r).

    Raises:
        DomainError: fewer than 3 values or a non-positive value
    """
    pairs = method_values(run, method)
    if len(pairs) < 3:
        raise DomainError(f"need at least 3 values of {method!r} to fit, got {len(pairs)}")
    r, value = np.array(pairs).T
    if np.any(value <= 0):
        raise DomainError(f"cannot fit non-positive values of {method!r}")
    x, y = np.log(r), np.log(value)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sum((y - (slope * x + intercept)) ** 2))
    spread = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - residual / spread if spread > 0 else 1.0
    return FitResult(
        method=method,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=min(1.0, max(0.0, r_squared)),
        points=len(pairs),
    )


def reference_values(run: ScalingRun) -> List[Dict[str, Optional[float]]]:
    """
    Theoretical curves per radius: the rectangle closed form (8/3)(4/3)^k_r
    (Koch only) and the ceiling-free power law (4/3)^(log_3(1/(3r))).
    """
    rows = []
    for r in run.radii:
        row: Dict[str, Optional[float]] = {"r": r, "rect_closed_form": None, "power_law": None}
        if run.instance == "koch" and r < 1 / 3:
            row["rect_closed_form"] = cover_service.rectangle_cover_length(bounds_service.scale_index(r).k)
            row["power_law"] = (8 / 3) * (4 / 3) ** bounds_service.continuous_scale_index(r)
        rows.append(row)
    return rows


def convergence_sweep(
    e: PointCloud,
    radii: Sequence[float],
    mode: str = TargetMode.NEIGHBORHOOD,
    cfg: Optional[SolverConfig] = None,
    instance: str = "custom",
    progress: bool = False,
) -> ConvergenceTable:
    """
    Solve at each radius and measure d_H(solution, e).

    Curves are sampled at one spacing (a tenth of the smallest radius) for
    every row, so rows are comparable. Every radius starts from the greedy
    cover tree alone, never from a curve through e.
    """
    radii = _check_radii(radii)
    cfg = (cfg or SolverConfig()).model_copy(update={"inscribed_seed": False})
    e.require_non_empty("convergence input")
    sample_eps = radii[-1] / 10
    rows = []
    for r in tqdm(radii, desc="convergence", disable=not progress):
        try:
            solution = solver_service.solve(e, r, mode, cfg)
            distance = hausdorff_distance(solution.curve, e, eps=sample_eps)
            rows.append(
                ConvergenceRow(r=r, hausdorff=distance, ratio=distance / r, length=solution.length, sample_eps=sample_eps)
            )
            logger.info(f"Convergence r={r:.6g}: d_H={distance:.6g} length={solution.length:.6f}")
        except MaxDistError as exc:
            logger.warning(f"Convergence r={r:.6g} failed: {exc.detail}")
            rows.append(ConvergenceRow(r=r, error=exc.detail))
    return ConvergenceTable(instance=instance, mode=mode, rows=rows)
