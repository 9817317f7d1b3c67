"""ngnboost run command."""

import logging
from typing import Optional

import click

from ngnboost import ExperimentConfig, run_experiment
from ngnboost.report import results_text

from .main import (
    apply_log_level,
    cli_errors,
    get_config_value,
    import_plugin_modules,
    load_config_file,
    main,
    set_config_value,
)

logger = logging.getLogger("ngnboost")


@main.command("run")
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    help="Path to ngnboost.yaml config file",
    metavar="PATH",
)
@click.option(
    "--out",
    required=True,
    type=click.Path(file_okay=False),
    help="Directory receiving the ledger and every report artifact",
    metavar="DIR",
)
@click.option(
    "--data",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Dataset CSV (overrides data.path; synthetic data when neither is set)",
    metavar="PATH",
)
@click.option(
    "--concurrency",
    type=int,
    default=None,
    help="Number of runs executed at once",
    metavar="N",
)
@click.option(
    "--ledger-url",
    envvar="NGNBOOST_LEDGER_URL",
    default=None,
    help="SQLAlchemy URL of the run ledger (default: sqlite file in --out)",
    metavar="URL",
)
@click.option(
    "--plugin",
    multiple=True,
    help="Module registering extra classifiers or selectors (can be used multiple times)",
    metavar="MODULE",
)
@click.pass_context
def run_cmd(
    ctx: click.Context,
    config: Optional[str],
    out: str,
    data: Optional[str],
    concurrency: Optional[int],
    ledger_url: Optional[str],
    plugin: tuple[str, ...],
) -> None:
    """Run the classifier x selector grid and write the report.

    Configuration priority: CLI flags > config file > defaults.

    Examples:
        ngnboost run --out results
        ngnboost run --config ngnboost.yaml --data eeg.csv --out results --concurrency 4
    """
    config_data: dict = {}
    if config:
        config_data = load_config_file(config)
        logger.info(f"Loaded config from {config}")
    apply_log_level(ctx, config_data)
    config_data.pop("logging", None)

    if plugin:
        logger.info(f"Importing plugin modules: {', '.join(plugin)}")
        import_plugin_modules(plugin)

    set_config_value(config_data, "data.path", get_config_value(data, config_data, "data.path"))
    set_config_value(config_data, "experiment.concurrency", get_config_value(concurrency, config_data, "experiment.concurrency"))
    set_config_value(config_data, "ledger.url", get_config_value(ledger_url, config_data, "ledger.url"))

    with cli_errors():
        experiment = ExperimentConfig.from_dict(config_data)
        result = run_experiment(experiment, out)

    artifacts = result.artifacts
    click.echo(results_text(result.results, artifacts.classifier_labels, artifacts.selector_labels))
    click.echo(f"Experiment {result.config_hash}: {len(result.paths)} files written to {out}")
