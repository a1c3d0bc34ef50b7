"""
maxdist command line

Usage:
    maxdist generate koch --depth 3
    maxdist cover snowflake --r 0.1
    maxdist scaling koch --methods rect_cover,lower --radii pow3:2..7 --fit
    maxdist solve --input twoballs.json --r 1 --mode set

Exit codes: 0 success, 1 file errors, 2 bad flags or parameters,
3 a certificate failed.
"""

import logging
import sys

import click

from maxdist import __version__
from maxdist.cli.analysis import bound, convergence, scaling
from maxdist.cli.cover import cover
from maxdist.cli.generate import generate
from maxdist.cli.render import render
from maxdist.cli.solve import solve
from maxdist.core.errors import MaxDistError
from maxdist.core.logging_setup import configure_logging

logger = logging.getLogger(__name__)


class MaxDistGroup(click.Group):
    """Maps library errors onto their exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except MaxDistError as exc:
            logger.error(f"{type(exc).__name__}: {exc.detail}")
            click.echo(f"Error: {exc.detail}", err=True)
            ctx.exit(exc.exit_code)


@click.group(cls=MaxDistGroup)
@click.version_option(__version__, prog_name="maxdist")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.option("--quiet", "-q", is_flag=True, help="Hide progress bars")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, quiet: bool):
    """Shortest curves whose r-neighborhood covers a set: covers, bounds, solver, experiments."""
    configure_logging(verbose=verbose)
    ctx.ensure_object(dict)
    ctx.obj["progress"] = not quiet and sys.stderr.isatty()


for command in (generate, cover, bound, solve, scaling, convergence, render):
    cli.add_command(command)


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
