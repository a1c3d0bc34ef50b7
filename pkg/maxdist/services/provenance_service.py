"""
Provenance Service

Builds the metadata block embedded in every output file so a run can be
reproduced from the file alone.

Usage:
    from maxdist.services.provenance_service import build_metadata

    metadata = build_metadata(
        run_config=RunConfig(command="cover", params={"r": 0.1}),
        inputs={"target": "koch.json"},
    )
"""

from datetime import datetime, timezone
from typing import Any, Dict, Optional

import maxdist
from maxdist.schemas.run_config import RunConfig


def build_metadata(
    *,
    run_config: Optional[RunConfig] = None,
    inputs: Optional[Dict[str, str]] = None,
) -> Dict[str, Any]:
    """
    Metadata for an output file.

    Args:
        run_config: Merged command parameters; None for library calls
        inputs: Extra input paths by role, merged into the run config

    Returns:
        {"run_config": ..., "version": ..., "created_at": ISO-8601 UTC}
    """
    config = run_config or RunConfig(command="library")
    if inputs:
        config = config.model_copy(update={"inputs": {**config.inputs, **inputs}})
    return {
        "run_config": config.model_dump(mode="json"),
        "version": maxdist.__version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
