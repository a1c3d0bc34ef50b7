"""
Command-line interface (click)
"""

from maxdist.cli.main import cli, main

__all__ = ["cli", "main"]
