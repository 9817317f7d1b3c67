"""ngnboost CLI main entrypoint."""

import logging
from contextlib import contextmanager
from typing import Any, Iterator, Optional

import click
import yaml

from ngnboost.dataspace import Dataset, apply_standardizer, fit_standardizer, load_csv
from ngnboost.exceptions import NgnBoostError

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger("ngnboost")


def load_config_file(config_path: str) -> dict:
    """Load YAML configuration file."""
    try:
        with open(config_path, "r") as f:
            config = yaml.safe_load(f)
            return config or {}
    except FileNotFoundError as e:
        raise click.ClickException(f"Config file not found: {config_path}") from e
    except yaml.YAMLError as e:
        raise click.ClickException(f"Invalid YAML in config file: {e}") from e


def import_plugin_modules(modules: tuple[str, ...]) -> None:
    """Import modules that register extra classifiers or selectors."""
    for module_name in modules:
        try:
            __import__(module_name)
            logger.debug(f"Imported plugin module: {module_name}")
        except ImportError as e:
            raise click.ClickException(f"Failed to import plugin module '{module_name}': {e}")


def get_config_value(cli_value, config_dict: dict, config_key: str, default=None):
    """Get config value with priority: CLI flag > config file > default.

    Args:
        cli_value: Value from CLI flag (if provided)
        config_dict: Configuration dictionary from config file
        config_key: Dot-separated key path in config dict (e.g., "experiment.concurrency")
        default: Default value if not found

    Example:
        concurrency = get_config_value(cli_concurrency, config_data, "experiment.concurrency", 1)
    """
    if cli_value is not None:
        return cli_value

    current = config_dict
    for key in config_key.split("."):
        if isinstance(current, dict) and key in current:
            current = current[key]
        else:
            return default

    return current if current is not None else default


def set_config_value(config_dict: dict, config_key: str, value: Any) -> None:
    """Write a dot-separated key, creating sections on the way. None leaves the dict untouched."""
    if value is None:
        return
    *sections, last = config_key.split(".")
    current = config_dict
    for key in sections:
        if not isinstance(current.get(key), dict):
            current[key] = {}
        current = current[key]
    current[last] = value


def apply_log_level(ctx: click.Context, config_dict: Optional[dict] = None) -> None:
    """--log-level wins over logging.level from the config file."""
    level = get_config_value(ctx.obj.get("log_level") if ctx.obj else None, config_dict or {}, "logging.level")
    if level is None:
        return
    level = str(level).upper()
    if level not in LOG_LEVELS:
        raise click.ClickException(f"Unknown log level '{level}'. Use one of {', '.join(LOG_LEVELS)}")
    logging.getLogger().setLevel(level)


def load_training_data(path: str, label_column: str, valence_column: Optional[str], standardize: bool = True) -> Dataset:
    """Load a CSV and z-score it on its own rows."""
    dataset = load_csv(path, label_column=label_column, valence_column=valence_column)
    if standardize:
        dataset = apply_standardizer(fit_standardizer(dataset), dataset)
    return dataset


@contextmanager
def cli_errors() -> Iterator[None]:
    """Report library errors as a single diagnostic line with exit code 1."""
    try:
        yield
    except NgnBoostError as e:
        raise click.ClickException(str(e)) from e
    except OSError as e:
        raise click.ClickException(str(e)) from e


@click.group()
@click.version_option()
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Logging level (overrides logging.level in the config file)",
)
@click.pass_context
def main(ctx: click.Context, log_level: Optional[str]) -> None:
    """ngnboost: neural gas feature ranking and fuzzy, swarm-tuned boosting experiments."""
    ctx.ensure_object(dict)
    ctx.obj["log_level"] = log_level
    apply_log_level(ctx)


# Import commands to register them with the main group
from . import report_cli, run_cli, select_cli, synth_cli, tune_cli  # noqa: E402, F401
