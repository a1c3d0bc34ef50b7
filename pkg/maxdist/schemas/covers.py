"""
Pydantic schemas for constructive covers
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from maxdist.models.geometry import CurveGraph
from maxdist.schemas.coverage import CoverageCertificate
from maxdist.schemas.geometry import GraphDocument

# Relative slack when comparing a measured length with its closed-form bound
BOUND_RTOL = 1e-9


class CoverReport(BaseModel):
    """Upper-bound witness: a connected curve, its length and its certificate"""

    curve: CurveGraph = Field(..., description="Cover curve")
    length: float = Field(..., ge=0, description="H1 length of the curve")
    theoretical_bound: float = Field(..., ge=0, description="Closed-form bound the construction guarantees")
    certificate: CoverageCertificate = Field(..., description="Coverage certificate against the target")
    method: str = Field(..., description="Builder tag")
    pieces: int = Field(..., ge=1, description="Rectangles or circles placed")
    exact_length: Optional[float] = Field(None, description="Length with exact circles (circle covers only)")
    length_constant: Optional[float] = Field(None, description="Empirical c(alpha) = length / (r C^(1/alpha) 2^k_alpha(r))")

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_serializer("curve")
    def _dump_curve(self, curve: CurveGraph):
        return GraphDocument.from_graph(curve).model_dump()

    @model_validator(mode="after")
    def _check_bound(self):
        if self.length > self.theoretical_bound * (1 + BOUND_RTOL):
            raise ValueError(f"{self.method} length {self.length} exceeds its bound {self.theoretical_bound}")
        return self


class CircleSpec(BaseModel):
    """A circle embedded in R^n: center, radius and an orthonormal plane basis"""

    center: List[float] = Field(..., description="Circle center")
    radius: float = Field(..., gt=0, description="Circle radius")
    basis: List[List[float]] = Field(..., min_length=2, max_length=2, description="Two orthonormal vectors spanning the circle plane")


class CircleFamilyReport(BaseModel):
    """Circle family around the origin plus its Monte-Carlo validation"""

    dimension: int = Field(..., ge=2, le=3, description="Ambient dimension")
    r: float = Field(..., gt=0, description="Radius parameter")
    eps: float = Field(..., gt=0, description="Angular pitch")
    circles: List[CircleSpec] = Field(..., description="Family members")
    samples: int = Field(..., ge=1, description="Monte-Carlo sample count")
    max_distance: float = Field(..., ge=0, description="Largest sample distance to the family")
    passed: bool = Field(..., description="True iff max_distance <= r")

    @property
    def size(self) -> int:
        return len(self.circles)
