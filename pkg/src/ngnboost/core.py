"""Core ngnboost functionality: classifier/selector registries, run execution and the experiment grid."""

import asyncio
import hashlib
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import boostforest, fuzzifier, report, swarmopt
from .baselines import (
    cart_fit,
    cart_predict,
    chi2_select,
    lasso_select,
    lr_fit,
    lr_predict,
    nb_fit,
    nb_predict,
    ngn_select,
    pca_select,
    raw_select,
)
from .baselines.selectors import SelectorResult, apply_selector
from .config import ExperimentConfig, SplitSpec, load_config
from .dataspace import (
    RISK_CLASS_NAMES,
    Dataset,
    apply_standardizer,
    fit_standardizer,
    load_csv,
    round_half_up,
    split,
    synth,
    write_csv,
)
from .db import Ledger, default_ledger_url
from .exceptions import NgnBoostError, RegistryError, ReportError, SelectionError
from .fuzzifier import FuzzyThresholds
from .metrics import ConfusionMatrix, ResultsTable, accuracy, confusion
from .neuralgas import Codebook
from .report import ReportArtifacts
from .worker import RunJob, RunOutcome, RunWorker

logger = logging.getLogger(__name__)

_classifier_registry: dict[str, tuple[Callable, dict]] = {}
_selector_registry: dict[str, tuple[Callable, dict]] = {}

REFERENCE_SELECTOR = "ngn"
TUNED_CLASSIFIER = "pso_fuzzy_xgb"


@dataclass(frozen=True)
class RunContext:
    """What a classifier or selector factory may read besides its train split."""

    config: ExperimentConfig
    seed: int


@dataclass(frozen=True)
class FittedClassifier:
    """A trained model and the function mapping selected test features to labels."""

    model: Any
    predict: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    thresholds: Optional[FuzzyThresholds] = None
    tune: Optional[swarmopt.TuneResult] = None


@dataclass(frozen=True)
class FittedSelector:
    """Full-length selection (every feature ranked, or every component) of one train split."""

    result: SelectorResult
    codebook: Optional[Codebook] = None


def classifier(name: str, *, label: Optional[str] = None) -> Callable:
    """
    Decorator to register a classifier factory.

    The factory receives the selected train split and a RunContext and
    returns a FittedClassifier.

    Example:
        @classifier("nb", label="NB")
        def naive_bayes(train: Dataset, context: RunContext) -> FittedClassifier:
            ...
    """

    def decorator(f: Callable) -> Callable:
        if name in _classifier_registry:
            raise RegistryError(f"Classifier '{name}' already registered")
        _classifier_registry[name] = (f, {"label": label or name})
        return f

    return decorator


def selector(name: str, *, label: Optional[str] = None, keeps_all: bool = False) -> Callable:
    """
    Decorator to register a feature selector factory.

    The factory ranks every feature of the standardized train split; runs take
    the top-k prefix. `keeps_all` selectors are never truncated.

    Example:
        @selector("chi2", label="Chi-t")
        def chi_square(train: Dataset, context: RunContext) -> FittedSelector:
            ...
    """

    def decorator(f: Callable) -> Callable:
        if name in _selector_registry:
            raise RegistryError(f"Selector '{name}' already registered")
        _selector_registry[name] = (f, {"label": label or name, "keeps_all": keeps_all})
        return f

    return decorator


def get_registered_classifiers() -> dict[str, str]:
    """Registered classifier names mapped to their display labels."""
    return {name: meta["label"] for name, (_, meta) in _classifier_registry.items()}


def get_registered_selectors() -> dict[str, str]:
    """Registered selector names mapped to their display labels."""
    return {name: meta["label"] for name, (_, meta) in _selector_registry.items()}


def _lookup(registry: dict[str, tuple[Callable, dict]], kind: str, name: str) -> tuple[Callable, dict]:
    if name not in registry:
        raise RegistryError(f"Unknown {kind} '{name}'. Registered: {', '.join(registry)}")
    return registry[name]


# Classifiers


@classifier("nb", label="NB")
def _naive_bayes(train: Dataset, context: RunContext) -> FittedClassifier:
    model = nb_fit(train.features, train.labels, train.n_classes)
    return FittedClassifier(model=model, predict=lambda X: nb_predict(model, X))


@classifier("lr", label="LR")
def _logistic_regression(train: Dataset, context: RunContext) -> FittedClassifier:
    model = lr_fit(train.features, train.labels, context.config.logistic, train.n_classes)
    return FittedClassifier(model=model, predict=lambda X: lr_predict(model, X))


@classifier("dt", label="DT")
def _decision_tree(train: Dataset, context: RunContext) -> FittedClassifier:
    model = cart_fit(train.features, train.labels, context.config.cart, train.n_classes)
    return FittedClassifier(model=model, predict=lambda X: cart_predict(model, X))


@classifier("xgb", label="XGB")
def _booster(train: Dataset, context: RunContext) -> FittedClassifier:
    model = boostforest.fit(train.features, train.labels, context.config.boost, train.n_classes)
    return FittedClassifier(model=model, predict=lambda X: boostforest.predict(model, X))


def _fuzzy_booster(train: Dataset, context: RunContext, tuned: bool) -> FittedClassifier:
    fuzzy = context.config.fuzzy
    thr = fuzzifier.fit(train.features, fuzzy.low_quantile, fuzzy.high_quantile)
    names = train.feature_names
    if fuzzy.mode == "augment":
        names = names + tuple(f"{name}_state" for name in names)
    encoded = train.with_features(fuzzifier.encode(train.features, thr, fuzzy.mode), names)

    params = context.config.boost
    tune = None
    if tuned:
        swarm = replace(context.config.swarm, seed=context.seed)
        tune = swarmopt.tune_booster(encoded, params, swarm, context.config.tuning)
        params = tune.apply(params)

    model = boostforest.fit(encoded.features, encoded.labels, params, train.n_classes)
    return FittedClassifier(
        model=model,
        predict=lambda X: boostforest.predict(model, fuzzifier.encode(X, thr, fuzzy.mode)),
        thresholds=thr,
        tune=tune,
    )


@classifier("fuzzy_xgb", label="Fuzzy XGB")
def _fuzzy_xgb(train: Dataset, context: RunContext) -> FittedClassifier:
    return _fuzzy_booster(train, context, tuned=False)


@classifier(TUNED_CLASSIFIER, label="PSO Fuzzy XGB")
def _pso_fuzzy_xgb(train: Dataset, context: RunContext) -> FittedClassifier:
    return _fuzzy_booster(train, context, tuned=True)


# Selectors


@selector("chi2", label="Chi-t")
def _chi_square(train: Dataset, context: RunContext) -> FittedSelector:
    return FittedSelector(chi2_select(train.features, train.labels, train.n_features, train.n_classes))


@selector("pca", label="PCA")
def _principal_components(train: Dataset, context: RunContext) -> FittedSelector:
    return FittedSelector(pca_select(train.features, train.n_features))


@selector("lasso", label="Lasso")
def _lasso(train: Dataset, context: RunContext) -> FittedSelector:
    return FittedSelector(
        lasso_select(train.features, train.labels, train.n_features, context.config.lasso, train.n_classes)
    )


@selector(REFERENCE_SELECTOR, label="NGN")
def _neural_gas(train: Dataset, context: RunContext) -> FittedSelector:
    params = replace(context.config.neural_gas, seed=context.seed)
    result, codebook = ngn_select(train.features, train.n_features, params)
    return FittedSelector(result, codebook)


@selector("raw", label="Raw", keeps_all=True)
def _raw(train: Dataset, context: RunContext) -> FittedSelector:
    return FittedSelector(raw_select(train.features))


# Pipeline


def fit_selector(name: str, train: Dataset, config: ExperimentConfig, seed: int) -> FittedSelector:
    """Rank every feature of `train` with a registered selector."""
    factory, _ = _lookup(_selector_registry, "selector", name)
    return factory(train, RunContext(config=config, seed=seed))


def fit_classifier(name: str, train: Dataset, config: ExperimentConfig, seed: int) -> FittedClassifier:
    """Train a registered classifier on `train`."""
    factory, _ = _lookup(_classifier_registry, "classifier", name)
    return factory(train, RunContext(config=config, seed=seed))


def derive_seed(*parts: object) -> int:
    """Stable 32-bit seed from the given parts."""
    digest = hashlib.sha256("/".join(str(part) for part in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def feature_count(fraction: float, n_features: int) -> int:
    """k = max(1, round_half_up(fraction * d)), capped at d."""
    return min(n_features, max(1, round_half_up(fraction * n_features)))


def selected_feature_names(selection: SelectorResult, feature_names: tuple[str, ...]) -> tuple[str, ...]:
    if selection.kind == "pca":
        return tuple(f"pc{j}" for j in range(selection.k))
    return tuple(feature_names[i] for i in selection.indices)


@dataclass(frozen=True)
class PreparedSplit:
    """Standardized train/test splits of one seed with every selector fitted on train."""

    seed: int
    train: Dataset
    test: Dataset
    selectors: dict[str, FittedSelector]
    failures: dict[str, str] = field(default_factory=dict)


def prepare_split(
    train: Dataset,
    test: Dataset,
    seed: int,
    config: ExperimentConfig,
    selectors: Optional[tuple[str, ...]] = None,
) -> PreparedSplit:
    """Standardize both splits and fit the selectors.

    Nothing here reads test labels. Test features are read only when
    standardize_scope is 'full'. A selector that fails is recorded in
    `failures` and its runs fail later.
    """
    if config.experiment.standardize_scope == "full":
        pooled = Dataset(
            features=np.vstack([train.features, test.features]),
            labels=np.zeros(train.n_samples + test.n_samples, dtype=np.int64),
            feature_names=train.feature_names,
            n_classes=train.n_classes,
        )
        standardizer = fit_standardizer(pooled)
    else:
        standardizer = fit_standardizer(train)
    train = apply_standardizer(standardizer, train)
    test = apply_standardizer(standardizer, test)

    fitted: dict[str, FittedSelector] = {}
    failures: dict[str, str] = {}
    for name in selectors if selectors is not None else config.experiment.selectors:
        try:
            fitted[name] = fit_selector(name, train, config, derive_seed(seed, name))
        except NgnBoostError as e:
            logger.warning(f"Selector '{name}' failed on seed {seed}: {e}")
            failures[name] = f"{e.__class__.__name__}: {e}"
    return PreparedSplit(seed=seed, train=train, test=test, selectors=fitted, failures=failures)


def prepare_seed(data: Dataset, seed: int, config: ExperimentConfig) -> PreparedSplit:
    """Split with the base seed, then prepare_split."""
    spec = SplitSpec(train_ratio=config.split.train_ratio, seed=seed, stratified=config.split.stratified)
    train, test = split(data, spec)
    logger.info(f"Seed {seed}: {train.n_samples} train rows, {test.n_samples} test rows")
    return prepare_split(train, test, seed, config)


def execute_run(prepared: PreparedSplit, job: RunJob, config: ExperimentConfig) -> RunOutcome:
    """Truncate the fitted selector to k, train the classifier and score it on test."""
    fitted_selector = prepared.selectors.get(job.selector)
    if fitted_selector is None:
        reason = prepared.failures.get(job.selector, "selector was not prepared")
        raise SelectionError(f"selector '{job.selector}' unavailable: {reason}")

    selection = fitted_selector.result.head(min(job.k, fitted_selector.result.k))
    names = selected_feature_names(selection, prepared.train.feature_names)
    train = prepared.train.with_features(apply_selector(selection, prepared.train.features), names)
    X_test = apply_selector(selection, prepared.test.features)

    seed = derive_seed(job.seed, job.fraction_index, job.selector, job.classifier)
    fitted = fit_classifier(job.classifier, train, config, seed)

    predicted = fitted.predict(X_test)
    return RunOutcome(
        job=job,
        accuracy=accuracy(predicted, prepared.test.labels),
        confusion=confusion(predicted, prepared.test.labels, prepared.test.n_classes),
        selection=selection,
        fitted=fitted,
    )


def plan_runs(config: ExperimentConfig, n_features: int) -> list[RunJob]:
    """Every (seed, fraction, selector, classifier) of the grid in a fixed order."""
    grid = config.experiment
    jobs = []
    for seed in grid.seeds:
        for fraction_index, fraction in enumerate(grid.fractions):
            for selector_name in grid.selectors:
                _, meta = _lookup(_selector_registry, "selector", selector_name)
                k = n_features if meta["keeps_all"] else feature_count(fraction, n_features)
                for classifier_name in grid.classifiers:
                    _lookup(_classifier_registry, "classifier", classifier_name)
                    jobs.append(RunJob(classifier_name, selector_name, seed, fraction_index, fraction, k))
    return jobs


def load_dataset(config: ExperimentConfig) -> Dataset:
    """The configured CSV, or the synthetic surrogate when no path is set."""
    source = config.data
    if source.path is not None:
        return load_csv(source.path, label_column=source.label_column, valence_column=source.valence_column)
    logger.info(f"No dataset path configured; using synthetic data {asdict(source.synth)}")
    return synth(**asdict(source.synth))


def class_names(n_classes: int) -> tuple[str, ...]:
    if n_classes == len(RISK_CLASS_NAMES):
        return RISK_CLASS_NAMES
    return tuple(f"class {k}" for k in range(n_classes))


def reference_selector(selectors: tuple[str, ...]) -> str:
    return REFERENCE_SELECTOR if REFERENCE_SELECTOR in selectors else selectors[0]


def summed_confusions(
    outcomes: list[RunOutcome], classifiers: tuple[str, ...], reference: str, n_classes: int
) -> dict[str, ConfusionMatrix]:
    """Per classifier, the sum of its successful confusion matrices under the reference selector."""
    confusions = {}
    for name in classifiers:
        total = ConfusionMatrix(np.zeros((n_classes, n_classes), dtype=np.int64))
        for outcome in outcomes:
            if outcome.classifier == name and outcome.selector == reference and outcome.succeeded:
                total = total + outcome.confusion
        confusions[name] = total
    return confusions


def collect_artifacts(
    config: ExperimentConfig,
    data: Dataset,
    prepared: dict[int, PreparedSplit],
    outcomes: list[RunOutcome],
) -> ReportArtifacts:
    """Gather figure and audit inputs from finished runs and the first seed's train split."""
    grid = config.experiment
    reference = reference_selector(grid.selectors)
    K = data.n_classes
    confusions = summed_confusions(outcomes, grid.classifiers, reference, K)

    pso_trace = next(
        (
            outcome.fitted.tune.trace
            for outcome in outcomes
            if outcome.classifier == TUNED_CLASSIFIER
            and outcome.selector == reference
            and outcome.succeeded
            and outcome.fitted is not None
            and outcome.fitted.tune is not None
        ),
        None,
    )

    artifacts = ReportArtifacts(
        config_hash=config.config_hash(),
        class_names=class_names(K),
        classifier_labels={name: get_registered_classifiers()[name] for name in grid.classifiers},
        selector_labels={name: get_registered_selectors()[name] for name in grid.selectors},
        reference_selector=reference,
        confusions=confusions,
        pso_trace=pso_trace,
        feature_names=data.feature_names,
    )

    first = prepared.get(grid.seeds[0])
    if first is None:
        return artifacts
    try:
        ngn = first.selectors.get(REFERENCE_SELECTOR)
        if ngn is None or ngn.codebook is None:
            ngn = fit_selector(REFERENCE_SELECTOR, first.train, config, derive_seed(first.seed, REFERENCE_SELECTOR))
        top = int(ngn.result.indices[0])
        thresholds = fuzzifier.fit(first.train.features, config.fuzzy.low_quantile, config.fuzzy.high_quantile)
        column = first.train.features[:, top]
        membership = fuzzifier.membership_table(
            thresholds, top, config.fuzzy.membership_points, (float(column.min()), float(column.max()))
        )
    except NgnBoostError as e:
        logger.warning(f"Skipping neural gas and membership artifacts: {e}")
        return artifacts

    return replace(
        artifacts,
        ngn_scores=ngn.result.scores,
        codebook=ngn.codebook,
        thresholds=thresholds,
        membership=membership,
        membership_feature=data.feature_names[top],
    )


@dataclass(frozen=True)
class ExperimentResult:
    config_hash: str
    results: ResultsTable
    outcomes: list[RunOutcome] = field(repr=False)
    artifacts: ReportArtifacts = field(repr=False)
    paths: list[Path] = field(default_factory=list)


def run_experiment(config: ExperimentConfig, out_dir: str | Path) -> ExperimentResult:
    """
    Run the classifier x selector grid over every seed and feature fraction.

    Run failures are recorded, never raised; the ledger and every report
    artifact land in `out_dir` under names carrying the config hash.

    Example:
        result = run_experiment(load_config("ngnboost.yaml"), "results")
        print(result.results.cell("pso_fuzzy_xgb", "ngn").mean)
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ReportError(f"Cannot create output directory {out_dir}: {e}") from e

    config_hash = config.config_hash()
    grid = config.experiment
    logger.info(
        f"Starting experiment {config_hash}: {len(grid.classifiers)} classifiers x {len(grid.selectors)} selectors, "
        f"{len(grid.seeds)} seeds x {len(grid.fractions)} fractions"
    )

    data = load_dataset(config)
    jobs = plan_runs(config, data.n_features)

    prepared: dict[int, PreparedSplit] = {}
    seed_failures: dict[int, str] = {}
    for seed in grid.seeds:
        try:
            prepared[seed] = prepare_seed(data, seed, config)
        except NgnBoostError as e:
            logger.warning(f"Seed {seed} could not be prepared: {e}")
            seed_failures[seed] = f"{e.__class__.__name__}: {e}"

    def execute(job: RunJob) -> RunOutcome:
        if job.seed in seed_failures:
            raise NgnBoostError(f"seed {job.seed} preparation failed: {seed_failures[job.seed]}")
        return execute_run(prepared[job.seed], job, config)

    ledger = Ledger(config.ledger.url or default_ledger_url(out_dir, config_hash))
    try:
        ledger.reset(config_hash)
        worker = RunWorker(execute, concurrency=grid.concurrency, ledger=ledger, config_hash=config_hash)
        outcomes = asyncio.run(worker.run(jobs))
    finally:
        ledger.close()

    failed = sum(1 for outcome in outcomes if not outcome.succeeded)
    logger.info(f"Experiment {config_hash} finished: {len(outcomes) - failed} runs succeeded, {failed} failed")

    results = ResultsTable.aggregate(outcomes, grid.classifiers, grid.selectors, grid.fractions)
    artifacts = collect_artifacts(config, data, prepared, outcomes)

    paths = [report.write_config(config, out_dir)]
    if grid.persist_splits:
        paths.extend(_persist_splits(data, grid.seeds[0], config, out_dir, config_hash))
    paths.extend(report.report(results, artifacts, out_dir))
    return ExperimentResult(config_hash=config_hash, results=results, outcomes=outcomes, artifacts=artifacts, paths=paths)


def _persist_splits(data: Dataset, seed: int, config: ExperimentConfig, out_dir: Path, config_hash: str) -> list[Path]:
    """Unstandardized train/test rows of one seed, in the load_csv format."""
    spec = SplitSpec(train_ratio=config.split.train_ratio, seed=seed, stratified=config.split.stratified)
    try:
        train, test = split(data, spec)
        return [
            write_csv(train, out_dir / f"train-seed{seed}-{config_hash}.csv", config.data.label_column),
            write_csv(test, out_dir / f"test-seed{seed}-{config_hash}.csv", config.data.label_column),
        ]
    except NgnBoostError as e:
        logger.warning(f"Splits of seed {seed} not persisted: {e}")
        return []
    except OSError as e:
        raise ReportError(f"Cannot write splits to {out_dir}: {e}") from e


def rebuild_report(results_dir: str | Path, config_hash: Optional[str] = None) -> list[Path]:
    """Rewrite every table and figure of an earlier run from its ledger and CSVs.

    Nothing is retrained. `config_hash` is needed only when the directory
    holds more than one experiment.
    """
    results_dir = Path(results_dir)
    if config_hash is None:
        candidates = sorted(results_dir.glob("config-*.yaml"))
        if len(candidates) != 1:
            raise ReportError(
                f"Expected one config-<hash>.yaml in {results_dir}, found {len(candidates)}; pass the config hash"
            )
        config_path = candidates[0]
        config_hash = config_path.stem[len("config-") :]
    else:
        config_path = report.artifact_path(results_dir, "config", config_hash, "yaml")
        if not config_path.exists():
            raise ReportError(f"No config for hash {config_hash} in {results_dir}")

    config = load_config(config_path)
    grid = config.experiment
    ledger = Ledger(config.ledger.url or default_ledger_url(results_dir, config_hash))
    try:
        records = ledger.runs(config_hash)
    finally:
        ledger.close()
    if not records:
        raise ReportError(f"The ledger holds no runs of experiment {config_hash}")

    fraction_index = {fraction: i for i, fraction in enumerate(grid.fractions)}
    outcomes = [RunOutcome.from_record(record, fraction_index.get(record.fraction, 0)) for record in records]
    results = ResultsTable.aggregate(outcomes, grid.classifiers, grid.selectors, grid.fractions)

    shapes = [len(record.confusion) for record in records if record.confusion is not None]
    n_classes = shapes[0] if shapes else load_dataset(config).n_classes
    reference = reference_selector(grid.selectors)
    artifacts = ReportArtifacts(
        config_hash=config_hash,
        class_names=class_names(n_classes),
        classifier_labels={name: get_registered_classifiers().get(name, name) for name in grid.classifiers},
        selector_labels={name: get_registered_selectors().get(name, name) for name in grid.selectors},
        reference_selector=reference,
        confusions=summed_confusions(outcomes, grid.classifiers, reference, n_classes),
        **report.read_figure_inputs(results_dir, config_hash),
    )
    logger.info(f"Rebuilding report of experiment {config_hash} from {len(records)} ledger runs")
    return report.report(results, artifacts, results_dir)
