"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from ngnboost import ExperimentConfig
from ngnboost.dataspace import synth


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "unit: mark test as a unit test")
    config.addinivalue_line("markers", "integration: mark test as an integration test")


def small_config_dict(**experiment) -> dict:
    """Config sections with budgets small enough for unit tests."""
    grid = {
        "seeds": [1, 2],
        "fractions": [0.5],
        "classifiers": ["nb", "dt"],
        "selectors": ["raw", "chi2"],
    }
    grid.update(experiment)
    return {
        "data": {"synth": {"n": 120, "d": 6, "k": 3, "separation": 5.0, "seed": 3}},
        "experiment": grid,
        "neural_gas": {"n_neurons": 4, "t_max": 600},
        "boost": {"n_rounds": 5, "max_depth": 3},
        "swarm": {"swarm_size": 4, "max_iters": 3},
        "tuning": {"n_rounds": 3, "max_depth_bounds": [2, 4]},
        "logistic": {"n_iters": 200},
        "lasso": {"max_sweeps": 100},
    }


@pytest.fixture
def make_config_dict():
    """Plain-data form of make_config, for writing YAML files."""
    return small_config_dict


@pytest.fixture
def make_config():
    """Build an ExperimentConfig from the small budgets with grid overrides."""

    def factory(**experiment) -> ExperimentConfig:
        return ExperimentConfig.from_dict(small_config_dict(**experiment))

    return factory


@pytest.fixture
def small_config() -> ExperimentConfig:
    """Two seeds, one fraction, NB and DT over raw and chi-square."""
    return ExperimentConfig.from_dict(small_config_dict())


@pytest.fixture
def every_model_config() -> ExperimentConfig:
    """One seed, every registered classifier and selector, tiny budgets."""
    return ExperimentConfig.from_dict(
        small_config_dict(
            seeds=[1],
            classifiers=["nb", "lr", "dt", "xgb", "fuzzy_xgb", "pso_fuzzy_xgb"],
            selectors=["chi2", "pca", "lasso", "ngn", "raw"],
        )
    )


@pytest.fixture
def blobs():
    """Well separated 3-class data, 120 rows x 6 features."""
    return synth(n=120, d=6, k=3, separation=5.0, seed=3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
