"""
`bound`, `scaling` and `convergence`: certified bounds and sweeps over radii
"""

from typing import List, Optional, Sequence

import click

from maxdist.cli.io import POSITIVE, RADII, config_option, load_cloud, output_path, parse_list, run_config
from maxdist.core.errors import CertificateError, DomainError
from maxdist.models.tags import BoundMethod, TargetMode
from maxdist.schemas.solver import SolverConfig
from maxdist.services import bounds_service, experiment_service
from maxdist.services.provenance_service import build_metadata
from maxdist.services.report_service import FORMATS, bounds_frame, report, write_csv, write_json


def _floats(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(part) for part in parse_list(text)]
    except ValueError:
        raise DomainError(f"cannot parse {text!r} as a comma list of numbers") from None


def _write_reports(ctx: click.Context, data, formats: Sequence[str], prefix: str, fit_methods: Sequence[str] = (), **inputs) -> None:
    config = run_config(ctx, **inputs)
    for fmt in formats:
        path = report(data, fmt, f"{prefix}.{fmt}", run_config=config, fit_methods=fit_methods)
        click.echo(f"wrote {path}")


def _fit_methods(methods: Sequence[str]) -> List[str]:
    """Fit each upper method; `lower` fits the packing values."""
    return [BoundMethod.PACKING if method == BoundMethod.LOWER else method for method in methods]


@click.command()
@config_option
@click.option("--input", "input_path", type=str, required=True, help="Geometry file of E")
@click.option("--r", type=POSITIVE, required=True, help="Neighborhood radius")
@click.option("--mode", type=click.Choice(TargetMode.ALL), default=TargetMode.NEIGHBORHOOD, show_default=True)
@click.option("--separations", type=str, default=None, help="Comma list of packing separations d > 2r")
@click.option("--format", "fmt", type=click.Choice(("json", "csv")), default="json", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False))
@click.pass_context
def bound(ctx: click.Context, config_file, input_path: str, r: float, mode: str, separations: Optional[str], fmt: str, output: Optional[str]):
    """Best certified lower bound on the shortest cover length."""
    record = bounds_service.best_lower_bound(load_cloud(input_path), r, _floats(separations), mode)
    metadata = build_metadata(run_config=run_config(ctx, input=input_path))
    path = output_path(output, f"bounds.{fmt}")
    if fmt == "csv":
        write_csv(path, bounds_frame([record]), metadata)
    else:
        write_json(path, record, metadata)
    packed = f", packing N={record.witness.size}" if record.witness is not None else ""
    click.echo(f"lower bound r={r}: {record.lower:.6f} ({record.lower_method}{packed}) -> {path}")


@click.command()
@config_option
@click.argument("instance", type=click.Choice(sorted(experiment_service.INSTANCES)))
@click.option("--methods", type=str, default="rect_cover,lower", show_default=True, help="Comma list from rect_cover, circle_cover, solver, lower")
@click.option("--radii", type=RADII, required=True, help="pow3:a..b, pow2:a..b or r1,r2,...")
@click.option("--mode", type=click.Choice(TargetMode.ALL), default=TargetMode.NEIGHBORHOOD, show_default=True)
@click.option("--fit", is_flag=True, help="Fit log-log slopes and print them")
@click.option("--max-rounds", type=click.IntRange(min=1), default=50, show_default=True, help="Solver rounds")
@click.option("--format", "formats", type=click.Choice(FORMATS), multiple=True, default=("csv",), show_default=True)
@click.option("--output", "-o", type=str, default=None, help="Output path prefix (extension added per format)")
@click.pass_context
def scaling(
    ctx: click.Context,
    config_file,
    instance: str,
    methods: str,
    radii: List[float],
    mode: str,
    fit: bool,
    max_rounds: int,
    formats: Sequence[str],
    output: Optional[str],
):
    """Bounds and covers for one instance over decreasing radii."""
    selected = parse_list(methods)
    run = experiment_service.scaling_sweep(
        instance,
        radii,
        selected,
        mode,
        SolverConfig(max_rounds=max_rounds),
        progress=ctx.obj.get("progress", False) if ctx.obj else False,
    )
    fit_methods = _fit_methods(selected) if fit else []
    _write_reports(ctx, run, formats, output_path(output, f"{instance}_scaling"), fit_methods)

    for record in run.records:
        lower = "-" if record.lower is None else f"{record.lower:.6f}"
        upper = "-" if record.upper is None else f"{record.upper:.6f}"
        click.echo(f"r={record.r:.6g}: lower={lower} upper={upper}")
    for method in fit_methods:
        try:
            result = experiment_service.fit_exponent(run, method)
        except DomainError as exc:
            click.echo(f"fit {method}: {exc.detail}")
            continue
        click.echo(
            f"fit {method}: slope={result.slope:.6f} r2={result.r_squared:.12f} "
            f"(reference {run.reference_slope:.6f})"
        )

    broken = []
    for record in run.records:
        for method, value in record.methods.items():
            if value.error:
                click.echo(f"r={record.r:.6g} {method}: failed ({value.error})")
                if value.exit_code == CertificateError.exit_code:
                    broken.append(f"r={record.r:.6g} {method}: {value.error}")
    if broken:
        raise CertificateError(f"{len(broken)} certificates failed; first: {broken[0]}")


@click.command()
@config_option
@click.option("--input", "input_path", type=str, default=None, help="Geometry file of E")
@click.option("--instance", type=click.Choice(sorted(experiment_service.INSTANCES)), default=None, help="Built-in set instead of --input")
@click.option("--radii", type=RADII, required=True)
@click.option("--mode", type=click.Choice(TargetMode.ALL), default=TargetMode.NEIGHBORHOOD, show_default=True)
@click.option("--delta", type=POSITIVE, default=0.002, show_default=True, help="Sample spacing for --instance")
@click.option("--max-rounds", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--format", "formats", type=click.Choice(FORMATS), multiple=True, default=("csv",), show_default=True)
@click.option("--output", "-o", type=str, default=None, help="Output path prefix")
@click.pass_context
def convergence(
    ctx: click.Context,
    config_file,
    input_path: Optional[str],
    instance: Optional[str],
    radii: List[float],
    mode: str,
    delta: float,
    max_rounds: int,
    formats: Sequence[str],
    output: Optional[str],
):
    """Solver output against E in Hausdorff distance as r shrinks."""
    if (input_path is None) == (instance is None):
        raise click.UsageError("give exactly one of --input and --instance")
    if input_path is not None:
        e, name = load_cloud(input_path), "custom"
    else:
        e, name = experiment_service.get_instance(instance).cloud(delta), instance
    table = experiment_service.convergence_sweep(
        e,
        radii,
        mode,
        SolverConfig(max_rounds=max_rounds),
        instance=name,
        progress=ctx.obj.get("progress", False) if ctx.obj else False,
    )
    _write_reports(ctx, table, formats, output_path(output, f"{name}_convergence"), input=input_path)

    for row in table.rows:
        if row.error:
            click.echo(f"r={row.r:.6g}: failed ({row.error})")
        else:
            click.echo(f"r={row.r:.6g}: d_H={row.hausdorff:.6g} ratio={row.ratio:.4f} length={row.length:.6f}")
    if table.max_ratio is not None:
        click.echo(f"max d_H/r = {table.max_ratio:.4f}")
    failed = [row for row in table.rows if row.error]
    if failed:
        raise CertificateError(f"{len(failed)} of {len(table.rows)} radii failed; first: {failed[0].error}")
