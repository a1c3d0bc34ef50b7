"""
Services package
Geometry, generators, certificates, bounds, covers, solver and experiments
"""

from maxdist.services.geometry_service import curve_length, hausdorff_distance, one_sided_deviation
from maxdist.services.coverage_service import covers, covers_neighborhood, neighborhood_target
from maxdist.services.bounds_service import best_lower_bound, scale_index
from maxdist.services.solver_service import solve
from maxdist.services.experiment_service import convergence_sweep, fit_exponent, scaling_sweep
from maxdist.services.report_service import report

__all__ = [
    "curve_length",
    "hausdorff_distance",
    "one_sided_deviation",
    "covers",
    "covers_neighborhood",
    "neighborhood_target",
    "best_lower_bound",
    "scale_index",
    "solve",
    "scaling_sweep",
    "fit_exponent",
    "convergence_sweep",
    "report",
]
