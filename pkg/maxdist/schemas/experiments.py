"""
Pydantic schemas for scaling and convergence experiments
"""

from typing import List, Optional

from pydantic import BaseModel, Field, field_validator

from maxdist.schemas.bounds import BoundsRecord


class ScalingRun(BaseModel):
    """Bounds records for one instance over strictly decreasing radii"""

    instance: str = Field(..., description="Instance tag (koch, segment, circle, ...)")
    mode: str = Field(..., description="Target mode")
    methods: List[str] = Field(..., description="Methods requested")
    radii: List[float] = Field(..., min_length=1, description="Radii, strictly decreasing")
    records: List[BoundsRecord] = Field(..., description="One record per radius")
    reference_slope: Optional[float] = Field(None, description="Theoretical log-log slope for this instance")

    @field_validator("radii")
    @classmethod
    def _strictly_decreasing(cls, radii):
        if any(b >= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly decreasing")
        return radii


class FitResult(BaseModel):
    """Least-squares fit of log(value) = slope * log(r) + intercept"""

    method: str = Field(..., description="Method tag that was fitted")
    slope: float = Field(..., description="Fitted exponent")
    intercept: float = Field(..., description="Fitted log-constant")
    r_squared: float = Field(..., ge=0, le=1, description="Coefficient of determination")
    points: int = Field(..., ge=3, description="Number of (r, value) pairs used")


class ConvergenceRow(BaseModel):
    """Solver output against the target set at one radius"""

    r: float = Field(..., gt=0)
    hausdorff: Optional[float] = Field(None, ge=0, description="d_H(solution curve, E)")
    ratio: Optional[float] = Field(None, ge=0, description="hausdorff / r")
    length: Optional[float] = Field(None, ge=0, description="Solution length")
    sample_eps: Optional[float] = Field(None, ge=0, description="Sampling density used for the curve in d_H")
    error: Optional[str] = Field(None, description="Failure detail when the solve failed")


class ConvergenceTable(BaseModel):
    """Convergence sweep output"""

    instance: str = Field(..., description="Instance tag")
    mode: str = Field(..., description="Target mode")
    rows: List[ConvergenceRow] = Field(..., description="One row per radius, in sweep order")

    @property
    def max_ratio(self) -> Optional[float]:
        ratios = [row.ratio for row in self.rows if row.ratio is not None]
        return max(ratios) if ratios else None
