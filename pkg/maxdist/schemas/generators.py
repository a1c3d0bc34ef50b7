"""
Pydantic schemas for test-set generators
"""

from pydantic import BaseModel, Field

KOCH_MAX_DEPTH = 12


class KochSpec(BaseModel):
    """Koch curve from (0,0) to (1,0) refined `depth` times"""

    depth: int = Field(..., ge=0, le=KOCH_MAX_DEPTH, description="Refinement depth m; vertex count is 4^m + 1")


class SampleSpec(BaseModel):
    """Sampling density request"""

    delta: float = Field(..., gt=0, description="Target density of the emitted cloud")
    seed: int = Field(0, description="Seed for optional lattice jitter")
    jitter: bool = Field(False, description="Randomly translate each lattice fill (off by default)")
