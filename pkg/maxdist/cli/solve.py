"""
`solve`: heuristic shortest tree for an input set
"""

from typing import Optional

import click

from maxdist.cli.io import POSITIVE, config_option, load_cloud, output_path, run_config
from maxdist.models.tags import TargetMode
from maxdist.schemas.solver import BALL_CUT_MIN_A, SolverConfig
from maxdist.services import solver_service
from maxdist.services.provenance_service import build_metadata
from maxdist.services.report_service import write_json


@click.command()
@config_option
@click.option("--input", "input_path", type=str, required=True, help="Geometry file of E")
@click.option("--r", type=POSITIVE, required=True, help="Neighborhood radius")
@click.option("--mode", type=click.Choice(TargetMode.ALL), default=TargetMode.NEIGHBORHOOD, show_default=True)
@click.option("--delta", type=POSITIVE, default=None, help="Target density (default r/10)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-rounds", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--ball-cut-a", type=click.FloatRange(min=BALL_CUT_MIN_A), default=BALL_CUT_MIN_A, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Solution file")
@click.pass_context
def solve(
    ctx: click.Context,
    config_file,
    input_path: str,
    r: float,
    mode: str,
    delta: Optional[float],
    seed: int,
    max_rounds: int,
    ball_cut_a: float,
    output: Optional[str],
):
    """Greedy cover tree improved by local moves, with its certificate."""
    cfg = SolverConfig(delta=delta, seed=seed, max_rounds=max_rounds, ball_cut_A=ball_cut_a)
    solution = solver_service.solve(load_cloud(input_path), r, mode, cfg)
    path = write_json(
        output_path(output, "solution.json"),
        solution,
        build_metadata(run_config=run_config(ctx, input=input_path)),
    )
    certificate = solution.certificate
    click.echo(
        f"solve r={r} mode={mode}: length={solution.length:.6f}, {solution.curve.vertex_count} vertices, "
        f"{solution.rounds_used} rounds, certificate {'pass' if certificate.passed else 'FAIL'} "
        f"margin={certificate.margin:.3g} -> {path}"
    )
