"""ngnboost tune command."""

import logging
from pathlib import Path
from typing import Optional

import click

from ngnboost import ExperimentConfig
from ngnboost.core import TUNED_CLASSIFIER, fit_classifier
from ngnboost.report import write_pso_trace

from .main import apply_log_level, cli_errors, get_config_value, load_config_file, load_training_data, main

logger = logging.getLogger("ngnboost")


@main.command("tune")
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
    type=click.Path(file_okay=False),
    help="Directory receiving the PSO trace CSV and SVG",
    metavar="DIR",
)
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    help="Path to ngnboost.yaml config file (fuzzy, boost, swarm and tuning sections)",
    metavar="PATH",
)
@click.option("--seed", type=int, default=None, help="Swarm seed (overrides swarm.seed)", metavar="SEED")
@click.option("--label-column", default=None, help="Label column name (overrides data.label_column)")
@click.pass_context
def tune_cmd(
    ctx: click.Context,
    data: str,
    out: str,
    config: Optional[str],
    seed: Optional[int],
    label_column: Optional[str],
) -> None:
    """Tune the fuzzy booster's depth and learning rate with the particle swarm.

    Only the best-cost trace is written; nothing is scored on held-out data.

    Examples:
        ngnboost tune --data train.csv --out tuning
        ngnboost tune --data train.csv --out tuning --config ngnboost.yaml --seed 3
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
        )
        fitted = fit_classifier(TUNED_CLASSIFIER, dataset, experiment, get_config_value(seed, config_data, "swarm.seed", 0))
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = write_pso_trace(fitted.tune.trace, out_dir, experiment.config_hash())

    tune = fitted.tune
    rounds = f", n_rounds={tune.n_rounds}" if tune.n_rounds is not None else ""
    click.echo(
        f"Best cost {tune.best_cost:.4f}: max_depth={tune.max_depth}, learning_rate={tune.learning_rate:.4f}{rounds}"
    )
    for path in paths:
        click.echo(f"Wrote {path}")
