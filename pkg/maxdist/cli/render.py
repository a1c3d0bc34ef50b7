"""
`render`: SVG of a cloud under a curve, or of a saved scaling run
"""

import json
from typing import Optional

import click
from pydantic import ValidationError

from maxdist.cli.io import config_option, load_cloud, load_graph, output_path, run_config
from maxdist.core.errors import InputError
from maxdist.schemas.experiments import ScalingRun
from maxdist.services import experiment_service, render_service
from maxdist.services.provenance_service import build_metadata
from maxdist.services.report_service import atomic_write, read_json


def _scaling_svg(path: str, stamp: str) -> str:
    _, data = read_json(path)
    try:
        run = ScalingRun.model_validate(data)
    except ValidationError as exc:
        raise InputError(f"{path} is not a scaling report: {exc}") from exc
    tags = []
    for record in run.records:
        tags.extend(method for method in record.methods if method not in tags)
    series = [(tag, experiment_service.method_values(run, tag)) for tag in tags]
    fits = []
    for tag in tags:
        pairs = experiment_service.method_values(run, tag)
        if len(pairs) >= 3 and all(value > 0 for _, value in pairs):
            fits.append(experiment_service.fit_exponent(run, tag))
    return render_service.log_log_plot(run.instance, series, fits, run.reference_slope, stamp)


@click.command()
@config_option
@click.option("--cloud", "cloud_path", type=str, default=None, help="Geometry file drawn as dots")
@click.option("--curve", "curve_path", type=str, default=None, help="Geometry, cover or solution file drawn as segments")
@click.option("--scaling", "scaling_path", type=str, default=None, help="Scaling JSON report drawn as a log-log plot")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="SVG file")
@click.pass_context
def render(ctx: click.Context, config_file, cloud_path: Optional[str], curve_path: Optional[str], scaling_path: Optional[str], output: Optional[str]):
    """Draw geometry or a scaling run as SVG."""
    if scaling_path is None and cloud_path is None and curve_path is None:
        raise click.UsageError("give --scaling, or --cloud and/or --curve")
    if scaling_path is not None and (cloud_path or curve_path):
        raise click.UsageError("--scaling cannot be combined with --cloud/--curve")
    config = run_config(ctx, cloud=cloud_path, curve=curve_path, scaling=scaling_path)
    stamp = json.dumps(build_metadata(run_config=config))

    if scaling_path is not None:
        svg = _scaling_svg(scaling_path, stamp)
    else:
        cloud = load_cloud(cloud_path) if cloud_path else None
        curve = load_graph(curve_path) if curve_path else None
        svg = render_service.layered_drawing(cloud, curve, stamp)
    path = atomic_write(output_path(output, "render.svg"), svg)
    click.echo(f"render -> {path}")
