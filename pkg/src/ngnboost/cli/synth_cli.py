"""ngnboost synth command."""

import logging
from typing import Optional

import click

from ngnboost.config import SynthSpec
from ngnboost.dataspace import synth, write_csv

from .main import cli_errors, main

logger = logging.getLogger("ngnboost")


@main.command("synth")
@click.option("--n", "n_samples", type=int, default=None, help="Number of rows", metavar="N")
@click.option("--d", "n_features", type=int, default=None, help="Number of features", metavar="D")
@click.option("--k", "n_classes", type=int, default=None, help="Number of classes", metavar="K")
@click.option("--separation", type=float, default=None, help="Distance between class centers", metavar="S")
@click.option("--seed", type=int, default=None, help="Random seed", metavar="SEED")
@click.option(
    "--out",
    required=True,
    type=click.Path(dir_okay=False),
    help="CSV file to write",
    metavar="PATH",
)
def synth_cmd(
    n_samples: Optional[int],
    n_features: Optional[int],
    n_classes: Optional[int],
    separation: Optional[float],
    seed: Optional[int],
    out: str,
) -> None:
    """Write a Gaussian surrogate dataset in the CSV format `run` reads.

    Examples:
        ngnboost synth --out synth.csv
        ngnboost synth --n 80 --d 10 --k 4 --separation 4.0 --seed 1 --out small.csv
    """
    defaults = SynthSpec()
    spec = SynthSpec(
        n=n_samples if n_samples is not None else defaults.n,
        d=n_features if n_features is not None else defaults.d,
        k=n_classes if n_classes is not None else defaults.k,
        separation=separation if separation is not None else defaults.separation,
        seed=seed if seed is not None else defaults.seed,
    )
    with cli_errors():
        dataset = synth(spec.n, spec.d, spec.k, spec.separation, spec.seed)
        path = write_csv(dataset, out)
    click.echo(f"Wrote {dataset.n_samples} rows x {dataset.n_features} features ({dataset.n_classes} classes) to {path}")
