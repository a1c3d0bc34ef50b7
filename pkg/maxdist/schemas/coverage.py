"""
Pydantic schema for coverage certificates
"""

from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CoverageCertificate(BaseModel):
    """
    Numeric witness that B(curve, r) contains a target set.

    `passed` is serialized as "pass". The margin is always r - delta - worst_distance.
    """

    passed: bool = Field(..., alias="pass", description="True iff worst_distance <= r - delta")
    r: float = Field(..., gt=0, description="Neighborhood radius")
    delta: float = Field(..., ge=0, description="Certified density of the target sample")
    worst_distance: float = Field(..., ge=0, description="Max distance from a target sample to the curve")
    worst_point: List[float] = Field(..., description="Target sample realizing worst_distance")
    margin: float = Field(..., description="r - delta - worst_distance")

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def _check_arithmetic(self):
        if self.margin != self.r - self.delta - self.worst_distance:
            raise ValueError("margin must equal r - delta - worst_distance")
        if self.passed != (self.worst_distance <= self.r - self.delta):
            raise ValueError("pass must agree with worst_distance <= r - delta")
        return self

    @classmethod
    def build(cls, r: float, delta: float, worst_distance: float, worst_point) -> "CoverageCertificate":
        r, delta, worst_distance = float(r), float(delta), float(worst_distance)
        return cls(
            passed=worst_distance <= r - delta,
            r=r,
            delta=delta,
            worst_distance=worst_distance,
            worst_point=[float(c) for c in worst_point],
            margin=r - delta - worst_distance,
        )
