"""
Report Service

Writes scaling runs, convergence tables, cover reports and solutions to
CSV, JSON or SVG with the provenance block embedded, and reads CSV/JSON
artifacts back.

Every write goes to a temp file in the destination directory and is moved
into place with os.replace, so a failed run never leaves a partial file.

Usage:
    from maxdist.services.report_service import report

    path = report(run, "csv", "koch_scaling.csv", run_config=config)
"""

import json
import logging
import os
import tempfile
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd
from pydantic import BaseModel

from maxdist.core.errors import DomainError, InputError
from maxdist.schemas.bounds import BoundsRecord
from maxdist.schemas.experiments import ConvergenceTable, FitResult, ScalingRun
from maxdist.schemas.run_config import RunConfig
from maxdist.services import experiment_service, render_service
from maxdist.services.provenance_service import build_metadata

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "svg")
FLOAT_FORMAT = "%.17g"
SCALING_COLUMNS = ["instance", "r", "method", "value", "certificate_margin", "error"]
BOUNDS_COLUMNS = ["instance", "r", "lower", "lower_method", "upper", "upper_method"]
CONVERGENCE_COLUMNS = ["instance", "mode", "r", "hausdorff", "ratio", "length", "sample_eps", "error"]
TEXT_COLUMNS = ("instance", "mode", "method", "error", "lower_method", "upper_method")

Reportable = Union[ScalingRun, ConvergenceTable]


def atomic_write(path: str, text: str) -> str:
    """
    Write text to path via a temp file in the same directory.

    Raises:
        InputError: the directory is missing or not writable
    """
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        handle, temp_path = tempfile.mkstemp(dir=directory, prefix=".maxdist-", suffix=".tmp")
        try:
            with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
                stream.write(text)
            os.replace(temp_path, path)
        except BaseException:
            if os.path.exists(temp_path):
                os.unlink(temp_path)
            raise
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    logger.debug(f"Wrote {path} ({len(text)} bytes)")
    return path


def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def write_json(path: str, data: Union[BaseModel, Dict[str, Any]], metadata: Dict[str, Any], **extra: Any) -> str:
    """{"metadata": ..., "data": ..., **extra} as indented JSON."""
    body = data.model_dump(mode="json", by_alias=True) if isinstance(data, BaseModel) else data
    return atomic_write(path, _dump({"metadata": metadata, "data": body, **extra}))


def read_json(path: str) -> Tuple[Dict[str, Any], Any]:
    """
    Returns:
        (metadata, data) of a report written by write_json

    Raises:
        InputError: missing file or malformed JSON
    """
    try:
        with open(path, encoding="utf-8") as stream:
            document = json.load(stream)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(document, dict) or "data" not in document:
        raise InputError(f"{path} is not a maxdist report")
    return document.get("metadata", {}), document["data"]


def scaling_frame(run: ScalingRun) -> pd.DataFrame:
    """One row per (radius, method) in sweep order."""
    rows = []
    for record in run.records:
        for method, entry in record.methods.items():
            rows.append(
                {
                    "instance": run.instance,
                    "r": record.r,
                    "method": method,
                    "value": entry.value,
                    "certificate_margin": entry.certificate_margin,
                    "error": entry.error or "",
                }
            )
    return pd.DataFrame(rows, columns=SCALING_COLUMNS).astype({"r": float, "value": float, "certificate_margin": float})


def bounds_frame(records: Sequence[BoundsRecord], instance: str = "custom") -> pd.DataFrame:
    """One BoundsRecord row per radius."""
    rows = [{"instance": instance, **record.csv_row()} for record in records]
    frame = pd.DataFrame(rows, columns=BOUNDS_COLUMNS).astype({"r": float, "lower": float, "upper": float})
    return frame.fillna({"lower_method": "", "upper_method": ""})


def convergence_frame(table: ConvergenceTable) -> pd.DataFrame:
    rows = [
        {"instance": table.instance, "mode": table.mode, **row.model_dump(exclude={"error"}), "error": row.error or ""}
        for row in table.rows
    ]
    numeric = {column: float for column in ("r", "hausdorff", "ratio", "length", "sample_eps")}
    return pd.DataFrame(rows, columns=CONVERGENCE_COLUMNS).astype(numeric)


def write_csv(path: str, frame: pd.DataFrame, metadata: Dict[str, Any]) -> str:
    """Provenance as a leading `# {json}` line, then the table at 17 significant digits."""
    header = "# " + json.dumps(metadata, allow_nan=False) + "\n"
    return atomic_write(path, header + frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"))


def read_csv(path: str) -> Tuple[Dict[str, Any], pd.DataFrame]:
    """
    Returns:
        (metadata, frame); empty text cells come back as "" and missing
        numbers as NaN, matching the frames this module writes

    Raises:
        InputError: missing file or no provenance line
    """
    try:
        with open(path, encoding="utf-8") as stream:
            first = stream.readline()
        if not first.startswith("# "):
            raise InputError(f"{path} has no provenance line")
        metadata = json.loads(first[2:])
        columns = pd.read_csv(path, skiprows=1, nrows=0).columns
        text = {column: str for column in columns if column in TEXT_COLUMNS}
        frame = pd.read_csv(path, skiprows=1, dtype=text, float_precision="round_trip")
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return metadata, frame.fillna({column: "" for column in text})


def _check_non_empty(data: Reportable) -> None:
    if isinstance(data, ScalingRun):
        if not data.records or not any(record.methods for record in data.records):
            raise DomainError(f"scaling run for {data.instance!r} has no records to report")
    elif isinstance(data, ConvergenceTable):
        if not data.rows:
            raise DomainError(f"convergence table for {data.instance!r} has no rows to report")
    else:
        raise DomainError(f"cannot report a {type(data).__name__}")


def _fits(run: ScalingRun, methods: Sequence[str]) -> List[FitResult]:
    fits = []
    for method in methods:
        try:
            fits.append(experiment_service.fit_exponent(run, method))
        except DomainError as exc:
            logger.warning(f"Skipping fit for {method}: {exc.detail}")
    return fits


def _svg(data: Reportable, fits: Sequence[FitResult], metadata: Dict[str, Any]) -> str:
    stamp = json.dumps(metadata, allow_nan=False)
    if isinstance(data, ScalingRun):
        tags = [m for m in data.records[0].methods] if data.records else []
        for record in data.records[1:]:
            tags.extend(m for m in record.methods if m not in tags)
        series = [(tag, experiment_service.method_values(data, tag)) for tag in tags]
        return render_service.log_log_plot(data.instance, series, fits, data.reference_slope, stamp)
    series = [
        ("hausdorff", [(row.r, row.hausdorff) for row in data.rows if row.hausdorff is not None]),
        ("length", [(row.r, row.length) for row in data.rows if row.length is not None]),
    ]
    return render_service.log_log_plot(f"{data.instance} convergence", series, fits, 1.0, stamp)


def report(
    data: Reportable,
    fmt: str,
    path: str,
    run_config: Optional[RunConfig] = None,
    fit_methods: Sequence[str] = (),
) -> str:
    """
    Write a scaling run or convergence table.

    csv: the per-method rows (scaling) or per-radius rows (convergence).
    json: the full record plus fits and reference curves.
    svg: log-log plot with fitted lines and the reference slope.

    Raises:
        DomainError: unknown format or empty data (no file is written)
        InputError: write failure
    """
    if fmt not in FORMATS:
        raise DomainError(f"unknown report format {fmt!r}; choose from {list(FORMATS)}")
    _check_non_empty(data)
    metadata = build_metadata(run_config=run_config)
    fits = _fits(data, fit_methods) if isinstance(data, ScalingRun) else []

    if fmt == "csv":
        frame = scaling_frame(data) if isinstance(data, ScalingRun) else convergence_frame(data)
        written = write_csv(path, frame, metadata)
    elif fmt == "json":
        extra: Dict[str, Any] = {"fits": [fit.model_dump(mode="json") for fit in fits]}
        if isinstance(data, ScalingRun):
            extra["reference"] = experiment_service.reference_values(data)
        else:
            extra["max_ratio"] = data.max_ratio
        written = write_json(path, data, metadata, **extra)
    else:
        written = atomic_write(path, _svg(data, fits, metadata))
    logger.info(f"Report written: {written} ({fmt})")
    return written
