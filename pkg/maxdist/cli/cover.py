"""
`cover`: explicit constructions with their coverage certificates
"""

import json
import math
from typing import Optional

import click

from maxdist.cli.io import POSITIVE, config_option, output_path, run_config
from maxdist.core.errors import CertificateError
from maxdist.schemas.covers import CoverReport
from maxdist.services import cover_service, experiment_service
from maxdist.services.provenance_service import build_metadata
from maxdist.services.report_service import write_json


def _finish(ctx: click.Context, report: CoverReport, output: str, check: bool) -> None:
    path = write_json(output, report, build_metadata(run_config=run_config(ctx)))
    certificate = report.certificate
    click.echo(
        f"{report.method}: length={report.length:.6f} (bound {report.theoretical_bound:.6f}), "
        f"{report.pieces} pieces, certificate {'pass' if certificate.passed else 'FAIL'} "
        f"margin={certificate.margin:.3g} -> {path}"
    )
    if check:
        click.echo(json.dumps(certificate.model_dump(mode="json", by_alias=True), indent=2))


def _common(command):
    command = click.option("--output", "-o", type=click.Path(dir_okay=False), help="Report file")(command)
    command = click.option("--check", is_flag=True, help="Print the full certificate")(command)
    return config_option(command)


@click.group()
def cover():
    """Build covers and certify them."""


@cover.command()
@_common
@click.option("--r", type=click.FloatRange(1 / 3, 1, max_open=True), required=True, help="Radius in [1/3, 1)")
@click.pass_context
def unit(ctx: click.Context, config_file, check: bool, output: Optional[str], r: float):
    """Unit rectangle around the snowflake (length 8/3)."""
    _finish(ctx, cover_service.unit_scale_report(r), output_path(output, "unit_cover.json"), check)


@cover.command()
@_common
@click.option("--r", type=click.FloatRange(0, 1 / 3, min_open=True, max_open=True), required=True, help="Radius in (0, 1/3)")
@click.option("--direct", is_flag=True, help="Certify the assembled cover instead of the rescaled unit case")
@click.pass_context
def snowflake(ctx: click.Context, config_file, check: bool, output: Optional[str], r: float, direct: bool):
    """Chain of 4^k_r rectangles (length (8/3)(4/3)^k_r)."""
    report = cover_service.snowflake_rectangle_cover(r, direct=direct)
    _finish(ctx, report, output_path(output, "snowflake_cover.json"), check)


@cover.command("circle")
@_common
@click.option("--instance", type=click.Choice(sorted(experiment_service.INSTANCES)), default="koch", show_default=True)
@click.option("--r", type=click.FloatRange(0, 1, min_open=True, max_open=True), required=True, help="Radius in (0, 1)")
@click.option("--holder-constant", type=click.FloatRange(min=1), default=None, help="C_gamma (estimated when omitted)")
@click.pass_context
def circle_cover(ctx: click.Context, config_file, check: bool, output: Optional[str], instance: str, r: float, holder_constant: Optional[float]):
    """Chained circles of radius r/2 along a Hölder parameterization."""
    spec = experiment_service.get_instance(instance)
    constant = holder_constant or experiment_service.holder_constant(instance)
    report = cover_service.holder_circle_cover(spec.sampler, spec.alpha, constant, r, target=spec.cloud(r / 40))
    spacing = cover_service.circle_centers_spacing(report)
    click.echo(f"max center spacing {spacing.max():.6g} (r={r}), c(alpha)={report.length_constant:.6g}")
    _finish(ctx, report, output_path(output, f"{instance}_circle_cover.json"), check)


@cover.command("rn-family")
@config_option
@click.option("--dimension", "-n", type=click.IntRange(2, 3), default=3, show_default=True)
@click.option("--r", type=POSITIVE, default=1.0, show_default=True)
@click.option("--eps", type=click.FloatRange(0, math.pi / 8, min_open=True), default=math.pi / 8, help="Angular pitch in (0, pi/8]")
@click.option("--samples", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Report file")
@click.pass_context
def rn_family(ctx: click.Context, config_file, dimension: int, r: float, eps: float, samples: int, seed: int, output: Optional[str]):
    """Circles of radius r/2 covering B(0, 1.1 r), checked by Monte Carlo."""
    report = cover_service.rn_circle_family(dimension, r, eps, samples=samples, seed=seed)
    path = write_json(output_path(output, "circle_family.json"), report, build_metadata(run_config=run_config(ctx)))
    click.echo(
        f"circle family n={dimension}: {report.size} circles, max distance {report.max_distance:.6f} "
        f"(r={r}) {'pass' if report.passed else 'FAIL'} -> {path}"
    )
    if not report.passed:
        raise CertificateError(f"{samples} samples: max distance {report.max_distance:.6g} exceeds r={r}")
