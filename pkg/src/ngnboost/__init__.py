"""ngnboost: neural gas feature ranking with fuzzy, swarm-tuned gradient boosting."""

from .config import (
    BoostParams,
    ExperimentConfig,
    FuzzyConfig,
    NGNParams,
    SplitSpec,
    SwarmParams,
    TuneConfig,
    load_config,
)
from .core import (
    classifier,
    execute_run,
    fit_classifier,
    fit_selector,
    get_registered_classifiers,
    get_registered_selectors,
    prepare_split,
    rebuild_report,
    run_experiment,
    selector,
)
from .dataspace import Dataset, load_csv, split, synth
from .exceptions import NgnBoostError
from .metrics import ConfusionMatrix, ResultsTable, accuracy, confusion
from .worker import RunJob, RunOutcome, RunWorker

__version__ = "0.1.0"
__all__ = [
    "ExperimentConfig",
    "SplitSpec",
    "NGNParams",
    "FuzzyConfig",
    "BoostParams",
    "SwarmParams",
    "TuneConfig",
    "load_config",
    "Dataset",
    "load_csv",
    "split",
    "synth",
    "classifier",
    "selector",
    "get_registered_classifiers",
    "get_registered_selectors",
    "fit_selector",
    "fit_classifier",
    "prepare_split",
    "execute_run",
    "run_experiment",
    "rebuild_report",
    "RunJob",
    "RunOutcome",
    "RunWorker",
    "ConfusionMatrix",
    "ResultsTable",
    "accuracy",
    "confusion",
    "NgnBoostError",
]
