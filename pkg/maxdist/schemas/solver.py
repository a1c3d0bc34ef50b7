"""
Pydantic schemas for the heuristic solver
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from maxdist.models.geometry import CurveGraph
from maxdist.schemas.coverage import CoverageCertificate
from maxdist.schemas.geometry import GraphDocument

BALL_CUT_MIN_A = 64.0


class SolverConfig(BaseModel):
    """
    Solver knobs. `delta` and `candidate_grid_pitch` default to r/10 and r/2;
    call `resolved(r)` to fill them in.
    """

    delta: Optional[float] = Field(None, gt=0, description="Target sampling density (default r/10)")
    seed: int = Field(0, description="Seed for any randomized step")
    max_rounds: int = Field(50, ge=1, description="Maximum improvement rounds")
    ball_cut_A: float = Field(BALL_CUT_MIN_A, ge=BALL_CUT_MIN_A, description="Ball-cut radius multiple A")
    candidate_grid_pitch: Optional[float] = Field(None, gt=0, description="Center grid pitch (default r/2)")
    inscribed_seed: bool = Field(True, description="In neighborhood mode, also improve the spanning tree through e")

    def resolved(self, r: float) -> "SolverConfig":
        return self.model_copy(
            update={
                "delta": self.delta if self.delta is not None else r / 10,
                "candidate_grid_pitch": self.candidate_grid_pitch if self.candidate_grid_pitch is not None else r / 2,
            }
        )


class MoveRecord(BaseModel):
    """One accepted solver move"""

    kind: str = Field(..., description="Move tag")
    delta_length: float = Field(..., description="Length change; <= 0 after the initial tree")


class Solution(BaseModel):
    """Certified tree returned by the solver"""

    curve: CurveGraph = Field(..., description="Solution tree")
    length: float = Field(..., ge=0, description="H1 length of the tree")
    certificate: CoverageCertificate = Field(..., description="Coverage certificate against the solver target")
    rounds_used: int = Field(..., ge=0, description="Improvement rounds executed")
    move_log: List[MoveRecord] = Field(default_factory=list, description="Accepted moves in order")
    mode: str = Field(..., description="Target mode (set or neighborhood)")

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_serializer("curve")
    def _dump_curve(self, curve: CurveGraph):
        return GraphDocument.from_graph(curve).model_dump()
