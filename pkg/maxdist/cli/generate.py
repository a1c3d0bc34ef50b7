"""
`generate`: test sets and their r-neighborhood samples as geometry JSON
"""

from typing import Optional

import click

from maxdist.cli.io import POINT, POSITIVE, config_option, load_cloud, output_path, run_config, save_geometry
from maxdist.models.geometry import PointCloud
from maxdist.schemas.generators import KOCH_MAX_DEPTH, KochSpec, SampleSpec
from maxdist.services.generator_service import (
    circle_set,
    koch_curve,
    koch_vertex_density,
    neighborhood_cloud,
    segment_set,
    two_points_set,
)
from maxdist.services.provenance_service import build_metadata


def _write(ctx: click.Context, output: str, cloud=None, curve=None, **inputs) -> None:
    path = save_geometry(output, build_metadata(run_config=run_config(ctx, **inputs)), cloud=cloud, curve=curve)
    parts = []
    if cloud is not None:
        parts.append(f"{len(cloud)} points (density {cloud.density:.6g})")
    if curve is not None:
        parts.append(f"{curve.vertex_count} vertices, {curve.edge_count} edges")
    click.echo(f"{ctx.info_name}: {', '.join(parts)} -> {path}")


@click.group()
def generate():
    """Write test sets as geometry JSON."""


@generate.command()
@config_option
@click.option("--depth", type=click.IntRange(0, KOCH_MAX_DEPTH), required=True, help="Refinement depth m")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Output file")
@click.pass_context
def koch(ctx: click.Context, config_file, depth: int, output: Optional[str]):
    """Koch polyline with 4^m + 1 vertices; its vertices form the cloud."""
    curve = koch_curve(KochSpec(depth=depth))
    cloud = PointCloud(points=curve.vertices, density=koch_vertex_density(depth))
    _write(ctx, output_path(output, f"koch_d{depth}.json"), cloud=cloud, curve=curve)


@generate.command()
@config_option
@click.option("--start", type=POINT, default="0,0", show_default=True)
@click.option("--end", type=POINT, default="1,0", show_default=True)
@click.option("--delta", type=POSITIVE, default=0.01, show_default=True, help="Sample spacing")
@click.option("--output", "-o", type=click.Path(dir_okay=False))
@click.pass_context
def segment(ctx: click.Context, config_file, start, end, delta: float, output: Optional[str]):
    """Evenly spaced samples of a segment."""
    cloud, curve = segment_set(start, end, delta)
    _write(ctx, output_path(output, "segment.json"), cloud=cloud, curve=curve)


@generate.command()
@config_option
@click.option("--center", type=POINT, default="0,0", show_default=True)
@click.option("--radius", type=POSITIVE, default=1.0, show_default=True)
@click.option("--delta", type=POSITIVE, default=0.01, show_default=True, help="Sample spacing")
@click.option("--output", "-o", type=click.Path(dir_okay=False))
@click.pass_context
def circle(ctx: click.Context, config_file, center, radius: float, delta: float, output: Optional[str]):
    """Polygon vertices around a circle."""
    cloud, curve = circle_set(center, radius, delta)
    _write(ctx, output_path(output, "circle.json"), cloud=cloud, curve=curve)


@generate.command("two-points")
@config_option
@click.option("--a", "a", type=POINT, default="0,0", show_default=True)
@click.option("--b", "b", type=POINT, default="3,0", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False))
@click.pass_context
def two_points(ctx: click.Context, config_file, a, b, output: Optional[str]):
    """The pair {a, b} with density 0."""
    cloud, curve = two_points_set(a, b)
    _write(ctx, output_path(output, "two_points.json"), cloud=cloud, curve=curve)


@generate.command()
@config_option
@click.option("--input", "input_path", type=str, required=True, help="Geometry file of E")
@click.option("--r", type=POSITIVE, required=True, help="Neighborhood radius")
@click.option("--delta", type=POSITIVE, required=True, help="Lattice density")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jitter", is_flag=True, help="Randomly shift the lattice")
@click.option("--output", "-o", type=click.Path(dir_okay=False))
@click.pass_context
def neighborhood(ctx: click.Context, config_file, input_path: str, r: float, delta: float, seed: int, jitter: bool, output: Optional[str]):
    """Lattice sample of B(E, r) with density delta_E + delta."""
    cloud = neighborhood_cloud(load_cloud(input_path), r, SampleSpec(delta=delta, seed=seed, jitter=jitter))
    _write(ctx, output_path(output, "neighborhood.json"), cloud=cloud, input=input_path)
