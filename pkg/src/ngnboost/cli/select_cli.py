"""ngnboost select command."""

import logging
from typing import Optional

import click

from ngnboost import ExperimentConfig
from ngnboost.core import fit_selector

from .main import apply_log_level, cli_errors, get_config_value, load_config_file, load_training_data, main

logger = logging.getLogger("ngnboost")

METHODS = ("chi2", "pca", "lasso", "ngn")


@main.command("select")
@click.option("--method", required=True, type=click.Choice(METHODS), help="Feature selector")
@click.option("--k", "k", required=True, type=int, help="Number of features or components to keep", metavar="K")
@click.option(
    "--data",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Training CSV",
    metavar="PATH",
)
@click.option(
    "--out",
    required=True,
    type=click.Path(dir_okay=False),
    help="CSV receiving the selection (indices and scores, or the projection)",
    metavar="PATH",
)
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    help="Path to ngnboost.yaml config file (neural_gas and lasso sections)",
    metavar="PATH",
)
@click.option("--seed", type=int, default=None, help="Neural gas seed (overrides neural_gas.seed)", metavar="SEED")
@click.option("--label-column", default=None, help="Label column name (overrides data.label_column)")
@click.option("--standardize/--no-standardize", default=True, help="Z-score the features before selecting")
@click.pass_context
def select_cmd(
    ctx: click.Context,
    method: str,
    k: int,
    data: str,
    out: str,
    config: Optional[str],
    seed: Optional[int],
    label_column: Optional[str],
    standardize: bool,
) -> None:
    """Rank the features of a training CSV and keep the top K.

    Examples:
        ngnboost select --method ngn --k 6 --data train.csv --out ngn.csv
        ngnboost select --method pca --k 3 --data train.csv --out pca.csv --config ngnboost.yaml
    """
    config_data: dict = {}
    if config:
        config_data = load_config_file(config)
    apply_log_level(ctx, config_data)
    config_data.pop("logging", None)

    with cli_errors():
        experiment = ExperimentConfig.from_dict(config_data)
        dataset = load_training_data(
            data,
            get_config_value(label_column, config_data, "data.label_column", "label"),
            experiment.data.valence_column,
            standardize,
        )
        fitted = fit_selector(method, dataset, experiment, get_config_value(seed, config_data, "neural_gas.seed", 0))
        selection = fitted.result.head(k)
        path = selection.to_csv(out, dataset.feature_names)

    if selection.kind == "pca":
        click.echo(f"Kept {k} principal components of {dataset.n_features} features")
    else:
        click.echo("Selected: " + ", ".join(dataset.feature_names[i] for i in selection.indices))
    click.echo(f"Wrote {path}")
