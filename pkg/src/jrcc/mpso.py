"""Modified particle swarm optimizer (maximization) and the allocation decoder.

MPSO = PSO with a linearly decreasing inertia weight plus a greedy Gaussian
local search applied to each particle right after its position update. With
``baseline_mode`` the inertia stays at ``inertia_start`` and no local search
runs, which is textbook global-best PSO.

Random numbers are drawn in a fixed order each step (``r1``, ``r2``, local
search mask, local search noise) so a seed fixes the whole trajectory.
Fitness evaluations may go through any order-preserving ``map`` (e.g. an
executor's), so results do not depend on how many workers evaluate them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .bargaining import Allocation, evaluate, largest_remainder
from .channel import ChannelSet
from .scenario import Scenario

Fitness = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class SwarmConfig:
    particles: int = 10
    iterations: int = 300
    inertia_start: float = 0.9
    inertia_end: float = 0.4
    cognitive: float = 2.0
    social: float = 2.0
    local_search_probability: float = 0.3
    local_search_step_fraction: float = 0.1
    velocity_clamp_fraction: float = 0.2
    seed: int = 0
    baseline_mode: bool = False

    def __post_init__(self):
        if self.particles < 2:
            raise ValueError("need at least 2 particles")
        if self.iterations < 1:
            raise ValueError("need at least 1 iteration")
        if not self.inertia_start >= self.inertia_end > 0:
            raise ValueError("need inertia_start >= inertia_end > 0")

    def inertia(self, t: int) -> float:
        if self.baseline_mode or self.iterations == 1:
            return self.inertia_start
        return self.inertia_start - (self.inertia_start - self.inertia_end) * t / (self.iterations - 1)

    def baseline(self) -> SwarmConfig:
        return replace(self, baseline_mode=True)


@dataclass
class SwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    values: np.ndarray
    personal_best_positions: np.ndarray
    personal_best_values: np.ndarray
    global_best_position: np.ndarray
    global_best_value: float
    lower: np.ndarray
    upper: np.ndarray
    rng: np.random.Generator
    iteration: int = 0

    @property
    def rng_state(self) -> dict:
        return self.rng.bit_generator.state

    def copy(self) -> SwarmState:
        rng = np.random.default_rng()
        rng.bit_generator.state = self.rng.bit_generator.state
        return SwarmState(self.positions.copy(), self.velocities.copy(), self.values.copy(),
                          self.personal_best_positions.copy(), self.personal_best_values.copy(),
                          self.global_best_position.copy(), self.global_best_value,
                          self.lower, self.upper, rng, self.iteration)


@dataclass
class Trace:
    global_best: list[float] = field(default_factory=list)
    wall_time: list[float] = field(default_factory=list)


def _eval_all(fitness: Fitness, xs: np.ndarray, mapper) -> np.ndarray:
    return np.array(list(mapper(fitness, list(xs))), dtype=float)


def _update_bests(state: SwarmState) -> None:
    better = state.values > state.personal_best_values
    state.personal_best_positions[better] = state.positions[better]
    state.personal_best_values[better] = state.values[better]
    # First index wins ties, so the reduction is order-independent.
    i = int(np.argmax(state.personal_best_values))
    if state.personal_best_values[i] > state.global_best_value:
        state.global_best_value = float(state.personal_best_values[i])
        state.global_best_position = state.personal_best_positions[i].copy()


def init_state(config: SwarmConfig, fitness: Fitness, bounds, mapper=map) -> SwarmState:
    lower, upper = (np.asarray(b, dtype=float) for b in bounds)
    rng = np.random.default_rng(config.seed)
    x = rng.uniform(lower, upper, size=(config.particles, lower.size))
    values = _eval_all(fitness, x, mapper)
    i = int(np.argmax(values))
    return SwarmState(x, np.zeros_like(x), values, x.copy(), values.copy(), x[i].copy(),
                      float(values[i]), lower, upper, rng)


def step(state: SwarmState, config: SwarmConfig, fitness: Fitness, mapper=map) -> SwarmState:
    """Advance the swarm one iteration (in place) and return it."""
    t = state.iteration
    rng = state.rng
    width = state.upper - state.lower
    P, D = state.positions.shape

    r1 = rng.uniform(size=(P, D))
    r2 = rng.uniform(size=(P, D))
    v = (config.inertia(t) * state.velocities
         + config.cognitive * r1 * (state.personal_best_positions - state.positions)
         + config.social * r2 * (state.global_best_position - state.positions))
    vmax = config.velocity_clamp_fraction * width
    v = np.clip(v, -vmax, vmax)
    x = np.clip(state.positions + v, state.lower, state.upper)
    state.velocities = v
    state.positions = x
    state.values = _eval_all(fitness, x, mapper)

    if not config.baseline_mode and config.local_search_probability > 0:
        mask = rng.uniform(size=P) < config.local_search_probability
        scale = config.local_search_step_fraction * width * (1.0 - t / config.iterations)
        noise = rng.standard_normal((P, D)) * scale
        idx = np.nonzero(mask)[0]
        if idx.size:
            trial = np.clip(x[idx] + noise[idx], state.lower, state.upper)
            trial_values = _eval_all(fitness, trial, mapper)
            accept = trial_values > state.values[idx]
            state.positions[idx[accept]] = trial[accept]
            state.values[idx[accept]] = trial_values[accept]

    _update_bests(state)
    state.iteration = t + 1
    return state


def run(config: SwarmConfig, fitness: Fitness, bounds,
        mapper=map) -> tuple[np.ndarray, float, Trace]:
    """Maximize ``fitness`` over the box ``bounds = (lower, upper)``."""
    state = init_state(config, fitness, bounds, mapper)
    trace = Trace()
    for _ in range(config.iterations):
        t0 = time.perf_counter()
        step(state, config, fitness, mapper)
        trace.global_best.append(state.global_best_value)
        trace.wall_time.append(time.perf_counter() - t0)
    return state.global_best_position.copy(), state.global_best_value, trace


# ---------------------------------------------------------------------------
# Allocation decoding

def _normalize(shares: np.ndarray, budget: float) -> np.ndarray:
    s = np.abs(shares)
    total = s.sum()
    if total <= 0:
        return np.full(s.shape, budget / s.size)
    return s / total * budget


def position_dimension(scenario: Scenario) -> int:
    return 3 * scenario.num_users + (1 if scenario.budgets.optimize_pap else 0)


def decode(position: np.ndarray, scenario: Scenario) -> Allocation:
    """Map a real vector to an allocation that meets every budget exactly.

    Layout: ``[power shares (K) | bandwidth shares (K) | module shares (K) | PAP?]``.
    Bandwidth shares are ignored (equal split) unless ``budgets.optimize_bandwidth``.
    """
    x = np.asarray(position, dtype=float)
    K = scenario.num_users
    if x.size != position_dimension(scenario):
        raise ValueError(f"position has {x.size} entries, expected {position_dimension(scenario)}")
    b = scenario.budgets
    pap = float(np.clip(x[3 * K], 0.0, 1.0)) if b.optimize_pap else b.power_allocation_parameter
    power = _normalize(x[:K], pap * b.total_power)
    if b.optimize_bandwidth:
        bandwidth = _normalize(x[K:2 * K], b.total_bandwidth)
    else:
        bandwidth = np.full(K, b.total_bandwidth / K)
    modules = largest_remainder(x[2 * K:3 * K], b.total_modules)
    return Allocation(tuple(power), tuple(bandwidth), modules, pap)


def allocation_bounds(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    d = position_dimension(scenario)
    return np.zeros(d), np.ones(d)


def nbs_fitness(scenario: Scenario, channels: ChannelSet,
                csi_error: float | None = None) -> Fitness:
    def fitness(x: np.ndarray) -> float:
        return evaluate(scenario, channels, decode(x, scenario), csi_error).nash_log
    return fitness


def optimize_allocation(scenario: Scenario, channels: ChannelSet, config: SwarmConfig | None = None,
                        csi_error: float | None = None,
                        mapper=map) -> tuple[Allocation, float, Trace]:
    """Solve the bargaining problem with (M)PSO; returns (allocation, log Nash product, trace)."""
    config = config or SwarmConfig()
    fitness = nbs_fitness(scenario, channels, csi_error)
    best_x, best, trace = run(config, fitness, allocation_bounds(scenario), mapper)
    return decode(best_x, scenario), best, trace
