"""Global-best particle swarm optimization and booster hyperparameter tuning."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import boostforest
from .config import BoostParams, SplitSpec, SwarmParams, TuneConfig
from .dataspace import Dataset, split
from .exceptions import ConfigError, OptimizationError

logger = logging.getLogger(__name__)

CONTINUOUS = "continuous"
INTEGER = "integer"

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class SearchBox:
    """Per-dimension bounds and kinds."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    kinds: tuple[str, ...]

    def __post_init__(self) -> None:
        if not (len(self.lower) == len(self.upper) == len(self.kinds)) or not self.lower:
            raise ConfigError("search box needs matching, non-empty lower/upper/kinds")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ConfigError(f"search box needs lower < upper in every dimension, got {self.lower}, {self.upper}")
        if any(kind not in (CONTINUOUS, INTEGER) for kind in self.kinds):
            raise ConfigError(f"dimension kinds must be '{CONTINUOUS}' or '{INTEGER}'")

    @property
    def dims(self) -> int:
        return len(self.lower)

    def evaluable(self, position: np.ndarray) -> np.ndarray:
        """Clip to the box and round integer dimensions."""
        point = np.clip(position, self.lower, self.upper)
        integer = np.array([kind == INTEGER for kind in self.kinds])
        point[integer] = np.round(point[integer])
        return point


@dataclass
class SwarmState:
    """Mutable swarm state; the optimizer owns it while iterating."""

    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_costs: np.ndarray
    gbest_position: np.ndarray
    gbest_cost: float
    trace: list[float]


@dataclass(frozen=True)
class SwarmResult:
    best_position: np.ndarray
    best_cost: float
    trace: tuple[float, ...]
    initial_costs: tuple[float, ...]


def _particle_rng(seed: int, iteration: int, particle: int) -> np.random.Generator:
    return np.random.default_rng((seed, iteration, particle))


def _evaluate(objective: Objective, box: SearchBox, positions: np.ndarray, workers: int) -> np.ndarray:
    points = [box.evaluable(x) for x in positions]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            costs = list(pool.map(objective, points))
    else:
        costs = [objective(point) for point in points]
    for point, cost in zip(points, costs):
        if not np.isfinite(cost):
            raise OptimizationError(f"objective returned {cost}", position=point.tolist())
    return np.asarray(costs, dtype=float)


def optimize(
    objective: Objective,
    box: SearchBox,
    params: SwarmParams = SwarmParams(),
    callback: Optional[Callable[[int, SwarmState], None]] = None,
) -> SwarmResult:
    """Minimize `objective` over `box`.

    Particles draw their random numbers from streams keyed by (seed, iteration,
    particle), and best updates are reduced in particle order, so the result
    does not depend on how evaluations are scheduled.
    """
    lower = np.asarray(box.lower, dtype=float)
    upper = np.asarray(box.upper, dtype=float)
    vmax = params.velocity_clamp * (upper - lower)

    positions = np.empty((params.swarm_size, box.dims))
    velocities = np.empty((params.swarm_size, box.dims))
    for i in range(params.swarm_size):
        rng = _particle_rng(params.seed, 0, i)
        positions[i] = rng.uniform(lower, upper)
        velocities[i] = rng.uniform(-vmax, vmax)

    costs = _evaluate(objective, box, positions, params.workers)
    best = int(np.argmin(costs))
    state = SwarmState(
        positions=positions,
        velocities=velocities,
        pbest_positions=positions.copy(),
        pbest_costs=costs.copy(),
        gbest_position=positions[best].copy(),
        gbest_cost=float(costs[best]),
        trace=[],
    )
    initial_costs = tuple(float(c) for c in costs)

    for iteration in range(1, params.max_iters + 1):
        for i in range(params.swarm_size):
            rng = _particle_rng(params.seed, iteration, i)
            r1 = rng.random(box.dims)
            r2 = rng.random(box.dims)
            velocity = (
                params.inertia * state.velocities[i]
                + params.cognitive * r1 * (state.pbest_positions[i] - state.positions[i])
                + params.social * r2 * (state.gbest_position - state.positions[i])
            )
            state.velocities[i] = np.clip(velocity, -vmax, vmax)
            state.positions[i] = np.clip(state.positions[i] + state.velocities[i], lower, upper)

        costs = _evaluate(objective, box, state.positions, params.workers)
        improved = costs < state.pbest_costs
        state.pbest_positions[improved] = state.positions[improved]
        state.pbest_costs[improved] = costs[improved]
        best = int(np.argmin(state.pbest_costs))
        if state.pbest_costs[best] < state.gbest_cost:
            state.gbest_cost = float(state.pbest_costs[best])
            state.gbest_position = state.pbest_positions[best].copy()
        state.trace.append(state.gbest_cost)
        logger.debug(f"swarm iteration {iteration}/{params.max_iters}: best cost {state.gbest_cost:.6f}")
        if callback is not None:
            callback(iteration, state)

    return SwarmResult(
        best_position=box.evaluable(state.gbest_position),
        best_cost=state.gbest_cost,
        trace=tuple(state.trace),
        initial_costs=initial_costs,
    )


@dataclass(frozen=True)
class TuneResult:
    max_depth: int
    learning_rate: float
    n_rounds: Optional[int]
    """Tuned round count, None unless TuneConfig.tune_n_rounds."""

    best_cost: float
    trace: tuple[float, ...]

    def apply(self, base: BoostParams) -> BoostParams:
        """Final-model parameters: tuned values over the base (full-round) settings."""
        params = replace(base, max_depth=self.max_depth, learning_rate=self.learning_rate)
        if self.n_rounds is not None:
            params = replace(params, n_rounds=self.n_rounds)
        return params


def tuning_box(tuning: TuneConfig) -> SearchBox:
    lower: list[float] = [tuning.max_depth_bounds[0], tuning.learning_rate_bounds[0]]
    upper: list[float] = [tuning.max_depth_bounds[1], tuning.learning_rate_bounds[1]]
    kinds = [INTEGER, CONTINUOUS]
    if tuning.tune_n_rounds:
        lower.append(tuning.n_rounds_bounds[0])
        upper.append(tuning.n_rounds_bounds[1])
        kinds.append(INTEGER)
    return SearchBox(lower=tuple(lower), upper=tuple(upper), kinds=tuple(kinds))


def snap_learning_rate(value: float, tuning: TuneConfig) -> float:
    """Round to the nearest multiple of tuning.learning_rate_step, kept inside the bounds."""
    low, high = tuning.learning_rate_bounds
    step = tuning.learning_rate_step
    if step > 0:
        value = round(round(value / step) * step, 12)
    return float(min(max(value, low), high))


def tune_booster(
    train: Dataset,
    base: BoostParams = BoostParams(),
    params: SwarmParams = SwarmParams(),
    tuning: TuneConfig = TuneConfig(),
) -> TuneResult:
    """Search max_depth and learning_rate minimizing 1 - accuracy.

    The objective fits on the inner split of `train` (stratified, seeded from
    params.seed) and scores the held-out part, or scores `train` itself when
    tuning.objective_scope is 'train'. Particles that land on the same depth,
    snapped learning rate and round count reuse one fitted booster.
    """
    train.check_all_classes()
    if tuning.objective_scope == "inner_val":
        fit_part, val_part = split(train, SplitSpec(train_ratio=tuning.inner_ratio, seed=params.seed, stratified=True))
    else:
        fit_part, val_part = train, train

    @lru_cache(maxsize=None)
    def cost_at(max_depth: int, learning_rate: float, n_rounds: int) -> float:
        booster_params = replace(base, max_depth=max_depth, learning_rate=learning_rate, n_rounds=n_rounds)
        model = boostforest.fit(fit_part.features, fit_part.labels, booster_params, n_classes=train.n_classes)
        return 1.0 - float(np.mean(boostforest.predict(model, val_part.features) == val_part.labels))

    def objective(position: np.ndarray) -> float:
        return cost_at(
            int(position[0]),
            snap_learning_rate(float(position[1]), tuning),
            int(position[2]) if tuning.tune_n_rounds else tuning.n_rounds,
        )

    result = optimize(objective, tuning_box(tuning), params)
    best = result.best_position
    learning_rate = snap_learning_rate(float(best[1]), tuning)
    logger.info(
        f"Tuned booster: max_depth={int(best[0])}, learning_rate={learning_rate:.4f}, best cost {result.best_cost:.4f} "
        f"({cost_at.cache_info().currsize} distinct fits)"
    )
    return TuneResult(
        max_depth=int(best[0]),
        learning_rate=learning_rate,
        n_rounds=int(best[2]) if tuning.tune_n_rounds else None,
        best_cost=result.best_cost,
        trace=result.trace,
    )


def sphere(position: Sequence[float]) -> float:
    """Sum of squares; minimum 0 at the origin."""
    return float(np.sum(np.square(position)))
