"""
File I/O and flag parsing shared by the commands.

Geometry files hold a cloud ({"dimension", "points", "density"}), a curve
({"vertices", "edges"}) or both, plus the provenance block. Reports written
by the services ({"metadata", "data": {...}}) are accepted wherever a curve
is read.
"""

import json
import logging
import os
import re
from typing import Any, Dict, List, Optional

import click
import yaml
from pydantic import ValidationError

from maxdist.core.config import MAX_CLOUD_SIZE, get_output_dir
from maxdist.core.errors import DomainError, InputError
from maxdist.models.geometry import CurveGraph, PointCloud
from maxdist.schemas.geometry import CloudDocument, GraphDocument
from maxdist.schemas.run_config import RunConfig
from maxdist.services.experiment_service import radii_pow2, radii_pow3
from maxdist.services.report_service import atomic_write

logger = logging.getLogger(__name__)

_POWER_RADII = re.compile(r"^(pow[23]):(\d+)\.\.(\d+)$")


def _read_document(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as stream:
            document = json.load(stream)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(document, dict):
        raise InputError(f"{path}: expected a JSON object")
    return document


def load_cloud(path: str) -> PointCloud:
    """
    Point cloud from a geometry file. A curve-only file yields its vertices.

    Raises:
        InputError: unreadable file, no geometry, or too many points
    """
    document = _read_document(path)
    try:
        if "points" in document:
            cloud = CloudDocument.model_validate(document).to_cloud()
        elif "vertices" in document:
            cloud = PointCloud(points=GraphDocument.model_validate(document).to_graph().vertices)
        else:
            raise InputError(f"{path} holds no point cloud")
    except ValidationError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if len(cloud) > MAX_CLOUD_SIZE:
        raise InputError(f"{path} has {len(cloud)} points (limit {MAX_CLOUD_SIZE})")
    logger.debug(f"Loaded {len(cloud)} points from {path}")
    return cloud


def load_graph(path: str) -> CurveGraph:
    """
    Curve from a geometry file, or from the `curve` of a solve/cover report.

    Raises:
        InputError: unreadable file or no curve in it
    """
    document = _read_document(path)
    data = document.get("data")
    if "vertices" not in document and isinstance(data, dict) and isinstance(data.get("curve"), dict):
        document = data["curve"]
    if "vertices" not in document:
        raise InputError(f"{path} holds no curve")
    try:
        return GraphDocument.model_validate(document).to_graph()
    except ValidationError as exc:
        raise InputError(f"{path}: {exc}") from exc


def save_geometry(
    path: str,
    metadata: Dict[str, Any],
    cloud: Optional[PointCloud] = None,
    curve: Optional[CurveGraph] = None,
) -> str:
    """Write cloud and/or curve fields; floats keep their shortest round-trip repr."""
    document: Dict[str, Any] = {}
    if cloud is not None:
        document.update(CloudDocument.from_cloud(cloud).model_dump())
    if curve is not None:
        document.update(GraphDocument.from_graph(curve).model_dump())
    document["metadata"] = metadata
    return atomic_write(path, json.dumps(document) + "\n")


def output_path(given: Optional[str], default_name: str) -> str:
    """--output if given, else default_name inside MAXDIST_OUTPUT_DIR."""
    return given or os.path.join(get_output_dir(), default_name)


def parse_radii(value: str) -> List[float]:
    """
    `pow3:a..b` (3^-m / 3), `pow2:a..b` (2^-m) or a comma list.

    Raises:
        DomainError: malformed text or empty range
    """
    text = value.strip().lower()
    match = _POWER_RADII.match(text)
    if match:
        kind, first, last = match.group(1), int(match.group(2)), int(match.group(3))
        if last < first:
            raise DomainError(f"empty radii range {value!r}")
        return radii_pow3(first, last) if kind == "pow3" else radii_pow2(first, last)
    try:
        radii = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise DomainError(f"cannot parse radii {value!r}; use pow3:a..b, pow2:a..b or r1,r2,...") from None
    if not radii:
        raise DomainError(f"no radii in {value!r}")
    return radii


def parse_list(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


class RadiiType(click.ParamType):
    name = "radii"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        try:
            return parse_radii(str(value))
        except DomainError as exc:
            self.fail(exc.detail, param, ctx)


class PointType(click.ParamType):
    """Comma-separated coordinates, e.g. `0,0` or `1.5,0,2`."""

    name = "point"

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return [float(c) for c in value]
        try:
            coords = [float(part) for part in str(value).split(",")]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated point", param, ctx)
        if len(coords) < 2:
            self.fail(f"{value!r} needs at least two coordinates", param, ctx)
        return coords


RADII = RadiiType()
POINT = PointType()
POSITIVE = click.FloatRange(min=0, min_open=True)


def _load_config(ctx: click.Context, param: click.Parameter, value: Optional[str]):
    """Eager callback: YAML values become defaults that explicit flags override."""
    if not value:
        return value
    try:
        with open(value, encoding="utf-8") as stream:
            loaded = yaml.safe_load(stream) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise click.BadParameter(f"cannot read config {value}: {exc}", ctx=ctx, param=param)
    if not isinstance(loaded, dict):
        raise click.BadParameter("config file must hold a mapping of option names", ctx=ctx, param=param)
    ctx.default_map = {**(ctx.default_map or {}), **{str(k).replace("-", "_"): v for k, v in loaded.items()}}
    return value


def config_option(command):
    return click.option(
        "--config",
        "config_file",
        type=click.Path(dir_okay=False),
        callback=_load_config,
        is_eager=True,
        expose_value=True,
        help="YAML file of option defaults",
    )(command)


def run_config(ctx: click.Context, **inputs: str) -> RunConfig:
    """RunConfig of the running command: merged params, seed and input paths."""
    params = {key: value for key, value in ctx.params.items() if key != "config_file"}
    if ctx.params.get("config_file"):
        inputs = {"config": ctx.params["config_file"], **inputs}
    return RunConfig(
        command=ctx.command_path.split(" ", 1)[-1],
        params=params,
        seed=params.get("seed"),
        inputs={role: path for role, path in inputs.items() if path},
    )
