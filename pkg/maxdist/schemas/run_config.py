"""
Run provenance schema embedded in every output file
"""

from typing import Any, Dict, Optional

from pydantic import BaseModel, Field


class RunConfig(BaseModel):
    """Everything needed to reproduce a command run"""

    command: str = Field(..., description="CLI command name")
    params: Dict[str, Any] = Field(default_factory=dict, description="Merged flag and config-file values")
    seed: Optional[int] = Field(None, description="Seed, when the command uses one")
    inputs: Dict[str, str] = Field(default_factory=dict, description="Input file paths by role")
