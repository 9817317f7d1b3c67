"""ngnboost report command."""

import logging
from typing import Optional

import click

from ngnboost.core import rebuild_report

from .main import apply_log_level, cli_errors, main

logger = logging.getLogger("ngnboost")


@main.command("report")
@click.option(
    "--results",
    required=True,
    type=click.Path(exists=True, file_okay=False),
    help="Output directory of an earlier `run`",
    metavar="DIR",
)
@click.option(
    "--hash",
    "config_hash",
    default=None,
    help="Config hash to rebuild (needed when the directory holds several experiments)",
    metavar="HASH",
)
@click.pass_context
def report_cmd(ctx: click.Context, results: str, config_hash: Optional[str]) -> None:
    """Rebuild tables and figures from the run ledger without retraining.

    Examples:
        ngnboost report --results results
        ngnboost report --results results --hash 3f2a9c1d7e45
    """
    apply_log_level(ctx)
    with cli_errors():
        paths = rebuild_report(results, config_hash)
    click.echo(f"Rewrote {len(paths)} files in {results}")
