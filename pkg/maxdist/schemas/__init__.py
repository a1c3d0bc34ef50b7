"""
Pydantic schemas for records, reports and file formats
"""

from maxdist.schemas.bounds import BoundsRecord, MethodValue, PackingWitness, ScaleIndex
from maxdist.schemas.coverage import CoverageCertificate
from maxdist.schemas.covers import CircleFamilyReport, CircleSpec, CoverReport
from maxdist.schemas.experiments import ConvergenceRow, ConvergenceTable, FitResult, ScalingRun
from maxdist.schemas.generators import KochSpec, SampleSpec
from maxdist.schemas.geometry import CloudDocument, GraphDocument
from maxdist.schemas.run_config import RunConfig
from maxdist.schemas.solver import MoveRecord, Solution, SolverConfig

__all__ = [
    "ScaleIndex",
    "PackingWitness",
    "MethodValue",
    "BoundsRecord",
    "CoverageCertificate",
    "CoverReport",
    "CircleSpec",
    "CircleFamilyReport",
    "ScalingRun",
    "FitResult",
    "ConvergenceRow",
    "ConvergenceTable",
    "KochSpec",
    "SampleSpec",
    "CloudDocument",
    "GraphDocument",
    "RunConfig",
    "SolverConfig",
    "MoveRecord",
    "Solution",
]
