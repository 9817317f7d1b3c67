"""Tests for particle swarm optimization and booster tuning."""

import numpy as np
import pytest

from ngnboost import boostforest, swarmopt
from ngnboost.config import BoostParams, SwarmParams, TuneConfig
from ngnboost.dataspace import synth
from ngnboost.exceptions import ConfigError, OptimizationError

CUBE = swarmopt.SearchBox(lower=(-5.0, -5.0, -5.0), upper=(5.0, 5.0, 5.0), kinds=(swarmopt.CONTINUOUS,) * 3)


class TestOptimize:
    """Test the swarm optimizer."""

    @pytest.mark.unit
    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_sphere(self, seed):
        """The swarm finds the origin of a 3-D sphere."""
        result = swarmopt.optimize(swarmopt.sphere, CUBE, SwarmParams(seed=seed))

        assert result.best_cost < 1e-3
        assert len(result.trace) == 100
        assert all(a >= b for a, b in zip(result.trace, result.trace[1:]))
        assert result.best_cost == result.trace[-1]

    @pytest.mark.unit
    def test_worker_count_does_not_change_the_result(self):
        """Threaded evaluation reproduces the sequential run."""
        serial = swarmopt.optimize(swarmopt.sphere, CUBE, SwarmParams(swarm_size=10, max_iters=20, seed=6))
        threaded = swarmopt.optimize(
            swarmopt.sphere, CUBE, SwarmParams(swarm_size=10, max_iters=20, seed=6, workers=4)
        )

        np.testing.assert_array_equal(serial.best_position, threaded.best_position)
        assert serial.trace == threaded.trace
        assert serial.initial_costs == threaded.initial_costs

    @pytest.mark.unit
    def test_seed_changes_the_run(self):
        first = swarmopt.optimize(swarmopt.sphere, CUBE, SwarmParams(swarm_size=5, max_iters=2, seed=1))
        second = swarmopt.optimize(swarmopt.sphere, CUBE, SwarmParams(swarm_size=5, max_iters=2, seed=2))

        assert first.initial_costs != second.initial_costs

    @pytest.mark.unit
    def test_integer_dimensions_are_rounded(self):
        """The objective only ever sees whole numbers in integer dimensions."""
        box = swarmopt.SearchBox(lower=(1.0, 0.0), upper=(9.0, 1.0), kinds=(swarmopt.INTEGER, swarmopt.CONTINUOUS))
        seen = []

        def objective(position):
            seen.append(position[0])
            return (position[0] - 4.0) ** 2 + position[1]

        result = swarmopt.optimize(objective, box, SwarmParams(swarm_size=6, max_iters=10))

        assert all(float(v).is_integer() and 1.0 <= v <= 9.0 for v in seen)
        assert float(result.best_position[0]).is_integer()

    @pytest.mark.unit
    def test_positions_stay_in_the_box(self):
        seen = []

        def objective(position):
            seen.append(position.copy())
            return -float(np.sum(position))

        swarmopt.optimize(objective, CUBE, SwarmParams(swarm_size=5, max_iters=15))

        points = np.array(seen)
        assert np.all(points >= -5.0) and np.all(points <= 5.0)

    @pytest.mark.unit
    def test_non_finite_cost(self):
        with pytest.raises(OptimizationError) as exc_info:
            swarmopt.optimize(lambda position: float("nan"), CUBE, SwarmParams(swarm_size=3, max_iters=1))

        assert exc_info.value.position is not None
        assert len(exc_info.value.position) == 3

    @pytest.mark.unit
    def test_callback_runs_every_iteration(self):
        calls = []

        swarmopt.optimize(
            swarmopt.sphere,
            CUBE,
            SwarmParams(swarm_size=3, max_iters=7),
            callback=lambda iteration, state: calls.append((iteration, state.gbest_cost)),
        )

        assert [iteration for iteration, _ in calls] == list(range(1, 8))

    @pytest.mark.unit
    def test_constant_objective(self):
        """A flat landscape keeps the trace at the constant."""
        result = swarmopt.optimize(lambda position: 2.5, CUBE, SwarmParams(swarm_size=6, max_iters=8))

        assert result.trace == (2.5,) * 8
        assert result.best_cost == 2.5

    @pytest.mark.unit
    def test_without_attraction_velocities_only_shrink(self):
        """With c1 = c2 = 0 each step is inertia times the last one."""
        norms = []

        swarmopt.optimize(
            swarmopt.sphere,
            CUBE,
            SwarmParams(swarm_size=5, max_iters=10, inertia=0.5, cognitive=0.0, social=0.0, seed=3),
            callback=lambda iteration, state: norms.append(np.linalg.norm(state.velocities, axis=1)),
        )

        assert len(norms) == 10
        assert all(np.all(later <= earlier) for earlier, later in zip(norms, norms[1:]))

    @pytest.mark.unit
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_best_is_no_worse_than_the_start(self, seed):
        result = swarmopt.optimize(swarmopt.sphere, CUBE, SwarmParams(swarm_size=8, max_iters=5, seed=seed))

        assert result.best_cost <= min(result.initial_costs)


class TestSearchBox:
    """Test search box validation."""

    @pytest.mark.unit
    def test_empty_interval(self):
        with pytest.raises(ConfigError):
            swarmopt.SearchBox(lower=(1.0,), upper=(1.0,), kinds=(swarmopt.CONTINUOUS,))

    @pytest.mark.unit
    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            swarmopt.SearchBox(lower=(0.0,), upper=(1.0,), kinds=("categorical",))

    @pytest.mark.unit
    def test_length_mismatch(self):
        with pytest.raises(ConfigError):
            swarmopt.SearchBox(lower=(0.0, 0.0), upper=(1.0,), kinds=(swarmopt.CONTINUOUS,))


class TestTuneBooster:
    """Test booster hyperparameter tuning."""

    SWARM = SwarmParams(swarm_size=4, max_iters=3, seed=5)
    TUNING = TuneConfig(max_depth_bounds=(2, 4), n_rounds=3)

    @pytest.mark.unit
    def test_result_within_bounds(self, blobs):
        result = swarmopt.tune_booster(blobs, BoostParams(), self.SWARM, self.TUNING)

        assert 2 <= result.max_depth <= 4
        assert 0.01 <= result.learning_rate <= 0.3
        assert result.n_rounds is None
        assert len(result.trace) == 3
        assert 0.0 <= result.best_cost <= 1.0

    @pytest.mark.unit
    def test_deterministic(self, blobs):
        first = swarmopt.tune_booster(blobs, BoostParams(), self.SWARM, self.TUNING)
        second = swarmopt.tune_booster(blobs, BoostParams(), self.SWARM, self.TUNING)

        assert first == second

    @pytest.mark.unit
    def test_round_count_dimension(self, blobs):
        tuning = TuneConfig(max_depth_bounds=(2, 4), n_rounds=3, tune_n_rounds=True, n_rounds_bounds=(2, 5))

        result = swarmopt.tune_booster(blobs, BoostParams(), self.SWARM, tuning)

        assert result.n_rounds is not None and 2 <= result.n_rounds <= 5

    @pytest.mark.unit
    def test_train_scope(self, blobs):
        tuning = TuneConfig(max_depth_bounds=(2, 4), n_rounds=3, objective_scope="train")

        result = swarmopt.tune_booster(blobs, BoostParams(), self.SWARM, tuning)

        assert 2 <= result.max_depth <= 4

    @pytest.mark.unit
    def test_separable_data_tunes_to_low_cost(self):
        """Four well separated classes leave at most 10% inner validation error."""
        data = synth(n=400, d=25, k=4, separation=4.0, seed=3)

        result = swarmopt.tune_booster(
            data, BoostParams(), SwarmParams(swarm_size=4, max_iters=2, seed=0), TuneConfig(n_rounds=10)
        )

        assert result.best_cost <= 0.1

    @pytest.mark.unit
    def test_snapped_learning_rates_share_fits(self, blobs, monkeypatch):
        """A coarse step leaves 8 depths x 4 rates, so at most 32 boosters are fitted."""
        original = boostforest.fit
        calls = []

        def counting_fit(*args, **kwargs):
            calls.append(args[2])
            return original(*args, **kwargs)

        monkeypatch.setattr(boostforest, "fit", counting_fit)
        tuning = TuneConfig(n_rounds=2, learning_rate_step=0.1)

        result = swarmopt.tune_booster(blobs, BoostParams(), SwarmParams(swarm_size=10, max_iters=5, seed=2), tuning)

        assert 0 < len(calls) <= 32
        assert len(set(calls)) == len(calls)
        assert {params.learning_rate for params in calls} <= {0.01, 0.1, 0.2, 0.3}
        assert result.learning_rate in {0.01, 0.1, 0.2, 0.3}

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "value, step, expected",
        [(0.137, 0.001, 0.137), (0.1372, 0.001, 0.137), (0.004, 0.1, 0.01), (0.29, 0.1, 0.3), (0.1234, 0.0, 0.1234)],
    )
    def test_snap_learning_rate(self, value, step, expected):
        tuning = TuneConfig(learning_rate_step=step)

        assert swarmopt.snap_learning_rate(value, tuning) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.unit
    def test_negative_step_rejected(self):
        with pytest.raises(ConfigError):
            TuneConfig(learning_rate_step=-0.1)

    @pytest.mark.unit
    def test_apply_keeps_base_settings(self):
        tuned = swarmopt.TuneResult(max_depth=4, learning_rate=0.05, n_rounds=None, best_cost=0.1, trace=(0.1,))

        params = tuned.apply(BoostParams(n_rounds=80, reg_lambda=2.0))

        assert params == BoostParams(max_depth=4, learning_rate=0.05, n_rounds=80, reg_lambda=2.0)
