"""Configuration for ngnboost.

Every pipeline stage takes a plain dataclass of parameters. ``ExperimentConfig``
bundles them into the nested layout of the YAML config file.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import TypeAdapter, ValidationError

from .exceptions import ConfigError, NgnBoostError

STANDARDIZE_SCOPES = ("train_only", "full")
FUZZY_MODES = ("replace", "augment")
OBJECTIVE_SCOPES = ("inner_val", "train")


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split parameters."""

    train_ratio: float = 0.7
    """Fraction of rows assigned to the train split."""

    seed: int = 0
    """Seed of the row permutation."""

    stratified: bool = True
    """Preserve per-class proportions."""

    def __post_init__(self) -> None:
        if not 0.0 < self.train_ratio < 1.0:
            raise ConfigError(f"train_ratio must lie in (0, 1), got {self.train_ratio}")
        if self.seed < 0:
            raise ConfigError(f"seed must be unsigned, got {self.seed}")


@dataclass(frozen=True)
class NGNParams:
    """Neural gas training schedule."""

    n_neurons: int = 10
    """Codebook size."""

    eps_initial: float = 0.5
    """Learning rate at the first presentation."""

    eps_final: float = 0.005
    """Learning rate at the last presentation."""

    lambda_initial: float = 10.0
    """Neighborhood range at the first presentation."""

    lambda_final: float = 0.5
    """Neighborhood range at the last presentation."""

    t_max: Optional[int] = None
    """Total presentations (None = 100 * n_samples)."""

    seed: int = 0
    """Seed for initialization and presentation order."""

    def __post_init__(self) -> None:
        if self.n_neurons < 1:
            raise ConfigError(f"n_neurons must be positive, got {self.n_neurons}")
        if not (0.0 < self.eps_final <= self.eps_initial <= 1.0):
            raise ConfigError(
                f"learning rates must satisfy 0 < eps_final <= eps_initial <= 1, "
                f"got {self.eps_initial} -> {self.eps_final}"
            )
        if not (0.0 < self.lambda_final <= self.lambda_initial):
            raise ConfigError(
                f"neighborhood ranges must satisfy 0 < lambda_final <= lambda_initial, "
                f"got {self.lambda_initial} -> {self.lambda_final}"
            )
        if self.t_max is not None and self.t_max < 1:
            raise ConfigError(f"t_max must be >= 1, got {self.t_max}")

    def presentations(self, n_samples: int) -> int:
        """Resolve t_max for a dataset of n_samples rows."""
        return self.t_max if self.t_max is not None else 100 * n_samples


@dataclass(frozen=True)
class FuzzyConfig:
    """Quantile fuzzification."""

    low_quantile: float = 0.33
    """Quantile of the lower threshold."""

    high_quantile: float = 0.67
    """Quantile of the upper threshold."""

    mode: str = "replace"
    """replace: states replace the features; augment: states are appended."""

    membership_points: int = 201
    """Sample count of the exported membership curves."""

    def __post_init__(self) -> None:
        if not 0.0 <= self.low_quantile <= self.high_quantile <= 1.0:
            raise ConfigError(
                f"quantiles must satisfy 0 <= low <= high <= 1, got {self.low_quantile}, {self.high_quantile}"
            )
        if self.mode not in FUZZY_MODES:
            raise ConfigError(f"fuzzy mode must be one of {FUZZY_MODES}, got '{self.mode}'")
        if self.membership_points < 2:
            raise ConfigError("membership_points must be >= 2")


@dataclass(frozen=True)
class BoostParams:
    """Gradient-boosted tree hyperparameters.

    The tuning box ([3, 10] for max_depth, [0.01, 0.3] for learning_rate)
    lives in ``TuneConfig``; fixed-parameter models accept any depth >= 1 and
    a learning rate in [0, 1].
    """

    max_depth: int = 6
    learning_rate: float = 0.3
    n_rounds: int = 100
    reg_lambda: float = 1.0
    min_child_weight: float = 1.0
    gamma_min_gain: float = 0.0

    def __post_init__(self) -> None:
        if self.max_depth < 1:
            raise ConfigError(f"max_depth must be >= 1, got {self.max_depth}")
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ConfigError(f"learning_rate must lie in [0, 1], got {self.learning_rate}")
        if self.n_rounds < 0:
            raise ConfigError(f"n_rounds must be >= 0, got {self.n_rounds}")
        if self.reg_lambda < 0 or self.min_child_weight < 0 or self.gamma_min_gain < 0:
            raise ConfigError("reg_lambda, min_child_weight and gamma_min_gain must be nonnegative")


@dataclass(frozen=True)
class SwarmParams:
    """Global-best particle swarm settings."""

    swarm_size: int = 50
    max_iters: int = 100
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445

    velocity_clamp: float = 0.2
    """Maximum per-step move as a fraction of each dimension's range."""

    seed: int = 0

    workers: int = 1
    """Threads evaluating one iteration's particles."""

    def __post_init__(self) -> None:
        if self.swarm_size < 2:
            raise ConfigError(f"swarm_size must be >= 2, got {self.swarm_size}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.velocity_clamp <= 0:
            raise ConfigError("velocity_clamp must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


@dataclass(frozen=True)
class TuneConfig:
    """Booster hyperparameter search."""

    max_depth_bounds: tuple[int, int] = (3, 10)
    learning_rate_bounds: tuple[float, float] = (0.01, 0.3)

    objective_scope: str = "inner_val"
    """inner_val: score on a held-out part of train; train: score on train itself."""

    inner_ratio: float = 0.8
    """Fit fraction of the inner validation split."""

    n_rounds: int = 50
    """Boosting rounds used while scoring particles."""

    tune_n_rounds: bool = False
    """Search the number of rounds as a third dimension."""

    n_rounds_bounds: tuple[int, int] = (20, 200)

    learning_rate_step: float = 0.001
    """Learning rates snap to multiples of this step (within bounds) before scoring; 0 disables."""

    def __post_init__(self) -> None:
        for name in ("max_depth_bounds", "learning_rate_bounds", "n_rounds_bounds"):
            low, high = getattr(self, name)
            if not low < high:
                raise ConfigError(f"{name} must satisfy lower < upper, got {(low, high)}")
        if self.max_depth_bounds[0] < 1:
            raise ConfigError("max_depth lower bound must be >= 1")
        if self.objective_scope not in OBJECTIVE_SCOPES:
            raise ConfigError(f"objective_scope must be one of {OBJECTIVE_SCOPES}, got '{self.objective_scope}'")
        if not 0.0 < self.inner_ratio < 1.0:
            raise ConfigError("inner_ratio must lie in (0, 1)")
        if self.n_rounds < 1:
            raise ConfigError("n_rounds must be >= 1")
        if self.learning_rate_step < 0:
            raise ConfigError("learning_rate_step must be >= 0")


@dataclass(frozen=True)
class LRConfig:
    """Multinomial logistic regression trained by full-batch gradient descent."""

    step_size: float = 0.1
    n_iters: int = 1000
    l2: float = 1e-4

    def __post_init__(self) -> None:
        if self.step_size <= 0 or self.n_iters < 0 or self.l2 < 0:
            raise ConfigError("step_size must be positive, n_iters and l2 nonnegative")


@dataclass(frozen=True)
class CARTConfig:
    """Gini decision tree."""

    max_depth: Optional[int] = None
    """None grows until leaves are pure or unsplittable."""

    min_samples_split: int = 2

    def __post_init__(self) -> None:
        if self.max_depth is not None and self.max_depth < 0:
            raise ConfigError("max_depth must be >= 0")
        if self.min_samples_split < 2:
            raise ConfigError("min_samples_split must be >= 2")


@dataclass(frozen=True)
class LassoConfig:
    """One-vs-rest Lasso selector."""

    lambda_l1: float = 0.01
    max_sweeps: int = 500
    tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.lambda_l1 < 0 or self.max_sweeps < 1 or self.tol < 0:
            raise ConfigError("lambda_l1 and tol must be nonnegative, max_sweeps >= 1")


@dataclass(frozen=True)
class SynthSpec:
    """Gaussian surrogate dataset."""

    n: int = 600
    d: int = 25
    k: int = 4
    separation: float = 3.0
    seed: int = 7


@dataclass(frozen=True)
class DataSource:
    """Where the experiment reads its dataset from."""

    path: Optional[str] = None
    """CSV file; None uses the synthetic surrogate."""

    label_column: str = "label"

    valence_column: Optional[str] = None
    """Derive risk labels from this column when the file has no label column."""

    synth: SynthSpec = field(default_factory=SynthSpec)


@dataclass(frozen=True)
class GridConfig:
    """The classifier x selector grid and its repetitions."""

    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    fractions: tuple[float, ...] = (0.25, 0.50, 0.75)
    classifiers: tuple[str, ...] = ("nb", "lr", "dt", "xgb", "fuzzy_xgb", "pso_fuzzy_xgb")
    selectors: tuple[str, ...] = ("chi2", "pca", "lasso", "ngn", "raw")

    standardize_scope: str = "train_only"
    """train_only fits the standardizer on train; full fits it on all feature rows."""

    concurrency: int = 1
    """Runs executed at once by the run worker."""

    persist_splits: bool = False
    """Write the first seed's train/test CSVs next to the results."""

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if any(seed < 0 for seed in self.seeds):
            raise ConfigError("seeds must be unsigned")
        if not self.fractions or any(not 0.0 < f <= 1.0 for f in self.fractions):
            raise ConfigError(f"fractions must be non-empty and lie in (0, 1], got {self.fractions}")
        if not self.classifiers or not self.selectors:
            raise ConfigError("classifiers and selectors must be non-empty")
        if self.standardize_scope not in STANDARDIZE_SCOPES:
            raise ConfigError(
                f"standardize_scope must be one of {STANDARDIZE_SCOPES}, got '{self.standardize_scope}'"
            )
        if self.concurrency < 1:
            raise ConfigError("concurrency must be >= 1")


@dataclass(frozen=True)
class LedgerConfig:
    """Run ledger database."""

    url: Optional[str] = None
    """SQLAlchemy URL (None = sqlite file in the output directory)."""


_SECTIONS: dict[str, type] = {
    "data": DataSource,
    "split": SplitSpec,
    "experiment": GridConfig,
    "neural_gas": NGNParams,
    "fuzzy": FuzzyConfig,
    "boost": BoostParams,
    "swarm": SwarmParams,
    "tuning": TuneConfig,
    "logistic": LRConfig,
    "cart": CARTConfig,
    "lasso": LassoConfig,
    "ledger": LedgerConfig,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete experiment configuration."""

    data: DataSource = field(default_factory=DataSource)
    split: SplitSpec = field(default_factory=SplitSpec)
    experiment: GridConfig = field(default_factory=GridConfig)
    neural_gas: NGNParams = field(default_factory=NGNParams)
    fuzzy: FuzzyConfig = field(default_factory=FuzzyConfig)
    boost: BoostParams = field(default_factory=BoostParams)
    swarm: SwarmParams = field(default_factory=SwarmParams)
    tuning: TuneConfig = field(default_factory=TuneConfig)
    logistic: LRConfig = field(default_factory=LRConfig)
    cart: CARTConfig = field(default_factory=CARTConfig)
    lasso: LassoConfig = field(default_factory=LassoConfig)
    ledger: LedgerConfig = field(default_factory=LedgerConfig)

    @classmethod
    def from_dict(cls, data: Optional[dict[str, Any]]) -> "ExperimentConfig":
        """Build a config from a nested mapping (e.g. parsed YAML).

        The ``logging`` section is accepted and ignored here; the CLI reads it.
        """
        data = dict(data or {})
        data.pop("logging", None)
        unknown = sorted(set(data) - set(_SECTIONS))
        if unknown:
            raise ConfigError(f"Unknown config sections: {', '.join(unknown)}")
        return cls(**{name: _build_section(name, section_cls, data.get(name)) for name, section_cls in _SECTIONS.items()})

    def to_dict(self) -> dict[str, Any]:
        """Nested plain-data view (tuples become lists)."""
        return json.loads(json.dumps(asdict(self)))

    def config_hash(self) -> str:
        """Short digest naming every artifact of this configuration."""
        canonical = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def _build_section(name: str, section_cls: type, data: Any) -> Any:
    if data is None:
        return section_cls()
    if not isinstance(data, dict):
        raise ConfigError(f"Config section '{name}' must be a mapping")
    allowed = {f.name for f in fields(section_cls)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"Unknown keys in section '{name}': {', '.join(unknown)}")
    try:
        return TypeAdapter(section_cls).validate_python(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid '{name}' section: {e}") from e
    except NgnBoostError as e:
        raise ConfigError(f"Invalid '{name}' section: {e}") from e


def load_config(path: str | Path) -> ExperimentConfig:
    """Load an ExperimentConfig from a YAML file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in config file: {e}") from e
    if data is not None and not isinstance(data, dict):
        raise ConfigError("Config file must contain a mapping of sections")
    return ExperimentConfig.from_dict(data)
