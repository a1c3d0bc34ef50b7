"""
Pydantic schemas for scale selection and Lambda bounds
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

# Relative slack when comparing a certified lower bound with a verified upper bound
SANDWICH_RTOL = 1e-9


class ScaleIndex(BaseModel):
    """Triadic level k with r' = 3^k r in [1/3, 1)"""

    k: int = Field(..., ge=1, description="Smallest positive k with 3^k r >= 1/3")
    r_prime: float = Field(..., ge=1 / 3, lt=1, description="Rescaled radius 3^k r")


class PackingWitness(BaseModel):
    """Points of the cloud pairwise separated by more than `separation`"""

    separation: float = Field(..., gt=0, description="Required pairwise separation d")
    points: List[List[float]] = Field(..., description="Packing centers")
    min_pairwise: Optional[float] = Field(None, description="Smallest pairwise distance in the packing (None if N < 2)")

    @property
    def size(self) -> int:
        return len(self.points)


class MethodValue(BaseModel):
    """One method's result at one radius"""

    value: Optional[float] = Field(None, description="Bound or verified length")
    certificate_margin: Optional[float] = Field(None, description="Margin of the coverage certificate backing an upper value")
    error: Optional[str] = Field(None, description="Failure detail when the method did not produce a value")
    exit_code: Optional[int] = Field(None, description="CLI exit code of the failure behind `error`")


class BoundsRecord(BaseModel):
    """
    Lambda(target, r) sandwich at a single radius.

    `lower`/`upper` hold the best certified values; `methods` keeps every
    method's individual result keyed by tag.
    """

    r: float = Field(..., gt=0, description="Neighborhood radius")
    lower: Optional[float] = Field(None, ge=0, description="Best certified lower bound")
    lower_method: Optional[str] = Field(None, description="Method that produced `lower`")
    upper: Optional[float] = Field(None, ge=0, description="Shortest verified cover length")
    upper_method: Optional[str] = Field(None, description="Method that produced `upper`")
    methods: Dict[str, MethodValue] = Field(default_factory=dict, description="Per-method results")
    witness: Optional[PackingWitness] = Field(None, description="Packing behind a packing lower bound")

    @model_validator(mode="after")
    def _check_sandwich(self):
        if self.lower is not None and self.upper is not None:
            if self.lower > self.upper * (1 + SANDWICH_RTOL):
                raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper} at r={self.r}")
        return self

    def csv_row(self) -> dict:
        return {
            "r": self.r,
            "lower": self.lower,
            "lower_method": self.lower_method,
            "upper": self.upper,
            "upper_method": self.upper_method,
        }
