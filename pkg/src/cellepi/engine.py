"""Synchronous time stepping, keyed randomness and Monte Carlo batches."""
from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import D, I, STATES, Cell, DiseaseParams, Population
from .rules import (Draws, NeighborhoodView, rule_birth_death, rule_disease_death,
                    rule_si, rule_sir, rule_sis, views_from_arrays)
from .topology import UNREACHABLE

N_DRAWS = len(Draws._fields)


class Model(str, enum.Enum):
    SI = "si"
    SIS = "sis"
    SIR = "sir"
    SIS_VITAL = "sis-vital"
    SIR_VITAL = "sir-vital"
    SIS_FATALITY = "sis-fatality"
    SIR_FATALITY = "sir-fatality"

    @property
    def base_rule(self):
        if self is Model.SI:
            return rule_si
        return rule_sis if self.value.startswith("sis") else rule_sir

    @property
    def vital(self) -> bool:
        return self.value.endswith(("-vital", "-fatality"))

    @property
    def fatality(self) -> bool:
        return self.value.endswith("-fatality")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimulationConfig:
    model: Model
    steps: int
    seed: int = 0
    replicas: int = 1

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.replicas < 1:
            raise ConfigError(f"replicas must be >= 1, got {self.replicas}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def echo(self) -> dict:
        return {"model": self.model.value, "steps": self.steps, "seed": self.seed, "replicas": self.replicas}


class DrawStream:
    """Counter-based uniforms keyed on (seed, replica, step, cell, draw index).

    Each step starts a fresh Philox counter at ``t``; cell ``c`` consumes the
    ``c``-th output block, so a cell's draws never depend on how many other
    cells exist or in which order they are evaluated.
    """

    def __init__(self, seed: int, replica: int = 0):
        self.seed = seed
        self.replica = replica
        self._key = np.random.SeedSequence([seed, replica]).generate_state(2, np.uint64)

    def draws(self, t: int, n_cells: int) -> np.ndarray:
        bitgen = np.random.Philox(key=self._key, counter=[0, t, 0, 0])
        return np.random.Generator(bitgen).random((n_cells, N_DRAWS))


@dataclass
class TimeSeries:
    """Per-step (S, I, R, D) counts for t = 0..steps.

    ``new_infections`` and ``new_deaths`` count transitions into I and D
    during each step (zero at t = 0).
    """

    counts: np.ndarray
    new_infections: np.ndarray
    new_deaths: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.counts) - 1

    @property
    def infected(self) -> np.ndarray:
        return self.counts[:, 1]

    def rows(self):
        for t, row in enumerate(self.counts):
            yield (t, *row.tolist())


@dataclass(frozen=True)
class Summary:
    peak: float
    peak_day: int
    extinction_day: int | None
    cumulative_deaths: float
    cumulative_infections: float


@dataclass
class BatchResult:
    mean: TimeSeries
    summaries: list[Summary]


def degree_masks(population: Population) -> np.ndarray:
    """Boolean masks[g, x, y]: y is at finite degree g from x, y != x."""
    m = population.degrees.matrix
    n = m.shape[0]
    masks = np.stack([m == g for g in range(population.degrees.max_degree + 1)])
    masks[:, np.arange(n), np.arange(n)] = False
    return masks & (m != UNREACHABLE)


def _apply_rules(states: np.ndarray, ages: np.ndarray, masks: np.ndarray, population: Population,
                 params: DiseaseParams, model: Model, t: int, draws: np.ndarray,
                 order: Sequence[int] | None = None) -> tuple[np.ndarray, np.ndarray]:
    sigma, delta = views_from_arrays(masks, states)
    new_states = states.copy()
    new_ages = ages.copy()
    base = model.base_rule
    profile = population.profile
    wrap = rule_disease_death if model.fatality else rule_birth_death
    cells = range(states.size) if order is None else order
    for x in cells:
        state = STATES[states[x]]
        view = NeighborhoodView(tuple(map(tuple, sigma[x].tolist())), tuple(delta[x].tolist()))
        d = Draws(*draws[x].tolist())
        if model.vital:
            outcome = wrap(Cell(state, int(ages[x])), base, t, view, profile, params, d)
            new_states[x] = outcome.new_state.index
            new_ages[x] = outcome.new_age
        elif state is not D:
            new_states[x] = base(state, view, profile, params, d.epidemic).index
    return new_states, new_ages


def _arrays(population: Population) -> tuple[np.ndarray, np.ndarray]:
    states = np.array([c.state.index for c in population.cells], dtype=np.int64)
    ages = np.array([c.age for c in population.cells], dtype=np.int64)
    return states, ages


def step(population: Population, params: DiseaseParams, model: Model | str, t: int,
         stream: DrawStream, order: Sequence[int] | None = None) -> Population:
    """Advance every cell once, all reading the same pre-step snapshot."""
    if t < 1:
        raise ConfigError("rule evaluation starts at t = 1")
    model = Model(model)
    states, ages = _arrays(population)
    draws = stream.draws(t, states.size)
    new_states, new_ages = _apply_rules(states, ages, degree_masks(population), population,
                                        params, model, t, draws, order)
    return population.with_cells(Cell(STATES[s], int(a)) for s, a in zip(new_states, new_ages))


def run_replica(scenario, config: SimulationConfig, replica: int = 0) -> TimeSeries:
    population = scenario.population
    params = scenario.params
    masks = degree_masks(population)
    stream = DrawStream(config.seed, replica)
    states, ages = _arrays(population)
    n_steps = config.steps
    counts = np.zeros((n_steps + 1, 4), dtype=np.int64)
    new_inf = np.zeros(n_steps + 1, dtype=np.int64)
    new_dead = np.zeros(n_steps + 1, dtype=np.int64)
    counts[0] = np.bincount(states, minlength=4)
    for t in range(1, n_steps + 1):
        draws = stream.draws(t, states.size)
        nxt, ages = _apply_rules(states, ages, masks, population, params, config.model, t, draws)
        new_inf[t] = np.count_nonzero((nxt == I.index) & (states != I.index))
        new_dead[t] = np.count_nonzero((nxt == D.index) & (states != D.index))
        states = nxt
        counts[t] = np.bincount(states, minlength=4)
    meta = dict(config.echo(), replica=replica, cells=int(states.size))
    return TimeSeries(counts, new_inf, new_dead, meta)


def _check(scenario) -> None:
    from .scenario import ScenarioError, validate

    problems = validate(scenario)
    if problems:
        raise ScenarioError(problems)


def simulate(scenario, config: SimulationConfig) -> TimeSeries:
    """Single run (replica 0) from the scenario's initial condition."""
    _check(scenario)
    return run_replica(scenario, config, 0)


def summarize(series: TimeSeries) -> Summary:
    infected = np.asarray(series.infected)
    peak_day = int(np.argmax(infected))
    zero = np.flatnonzero(infected[1:] == 0)
    extinction = int(zero[0]) + 1 if zero.size else None
    return Summary(
        peak=float(infected[peak_day]),
        peak_day=peak_day,
        extinction_day=extinction,
        cumulative_deaths=float(np.sum(series.new_deaths)),
        cumulative_infections=float(infected[0] + np.sum(series.new_infections)),
    )


def _replica_job(args):
    scenario, config, replica = args
    return run_replica(scenario, config, replica)


def batch_simulate(scenario, config: SimulationConfig, workers: int = 1) -> BatchResult:
    """Run ``config.replicas`` replicas and average them step by step.

    Replica ``r`` draws from the stream keyed on ``(seed, r)``. Results are
    reduced in replica order, so ``workers`` never changes the output.
    """
    _check(scenario)
    jobs = [(scenario, config, r) for r in range(config.replicas)]
    if workers > 1 and config.replicas > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_replica_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        runs = [_replica_job(j) for j in jobs]
    stack = np.stack([r.counts for r in runs]).astype(np.float64)
    mean = TimeSeries(
        counts=stack.mean(axis=0),
        new_infections=np.stack([r.new_infections for r in runs]).mean(axis=0),
        new_deaths=np.stack([r.new_deaths for r in runs]).mean(axis=0),
        meta=dict(config.echo(), cells=len(scenario.population)),
    )
    return BatchResult(mean, [summarize(r) for r in runs])
