"""Per-cell evolution rules.

Every rule is a pure function of the cell, its neighborhood counts, the
parameters and explicitly supplied uniform draws. Piecewise rules are
evaluated top-down and the first matching branch wins.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .core import MAX_AGE, Cell, D, DiseaseParams, I, R, S, EpidemicState, Population, band_probability
from .topology import UNREACHABLE, ImpactProfile

_S, _I, _R, _D = 0, 1, 2, 3


@dataclass(frozen=True)
class NeighborhoodView:
    """Neighbor counts of one cell, grouped by degree of impact.

    ``sigma[g]`` holds the (S, I, R, D) counts at degree ``g`` and
    ``delta[g]`` their total. The cell itself is never counted.
    """

    sigma: tuple[tuple[int, int, int, int], ...]
    delta: tuple[int, ...]

    def __post_init__(self):
        if len(self.sigma) != len(self.delta):
            raise ValueError("sigma and delta must cover the same degrees")
        for g, (counts, total) in enumerate(zip(self.sigma, self.delta)):
            if min(counts) < 0 or sum(counts) != total:
                raise ValueError(f"inconsistent counts at degree {g}: {counts} vs {total}")

    @classmethod
    def empty(cls) -> "NeighborhoodView":
        return cls((), ())

    def weighted(self, state_index: int, profile: ImpactProfile) -> float:
        """Sum over degrees of count-in-state times impact rate."""
        rates = profile.rates
        return sum(counts[state_index] * rates.get(g, 0.0) for g, counts in enumerate(self.sigma))


class TransitionOutcome(NamedTuple):
    new_state: EpidemicState
    new_age: int


class Draws(NamedTuple):
    """Independent uniforms for one cell and step, in consumption order."""

    disease: float
    natural: float
    birth: float
    epidemic: float


BaseRule = Callable[[EpidemicState, NeighborhoodView, ImpactProfile, DiseaseParams, float], EpidemicState]


def neighborhood_view(population: Population, x: int) -> NeighborhoodView:
    row = population.degrees.matrix[x]
    max_g = population.degrees.max_degree
    sigma = [[0, 0, 0, 0] for _ in range(max_g + 1)]
    for y, g in enumerate(row):
        if y == x or g == UNREACHABLE:
            continue
        sigma[g][population.cells[y].state.index] += 1
    return NeighborhoodView(tuple(tuple(c) for c in sigma), tuple(sum(c) for c in sigma))


def views_from_arrays(masks: np.ndarray, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised neighbor counts for a whole population.

    ``masks[g, x, y]`` is true when y sits at degree g from x (y != x);
    ``states`` holds state indices. Returns ``sigma`` shaped (n, G, 4) and
    ``delta`` shaped (n, G).
    """
    onehot = np.zeros((states.size, 4), dtype=np.int64)
    onehot[np.arange(states.size), states] = 1
    sigma = np.einsum("gxy,yk->xgk", masks.astype(np.int64), onehot)
    return sigma, sigma.sum(axis=2)


def infection_pressure(view: NeighborhoodView, profile: ImpactProfile, params: DiseaseParams) -> float:
    """Probability that a susceptible cell with this neighborhood gets infected.

    Degree classes with no members are skipped; the result is clamped to 1.
    """
    rates = profile.rates
    total = 0.0
    for g, (counts, size) in enumerate(zip(view.sigma, view.delta)):
        if size:
            total += counts[_I] / size * rates.get(g, 0.0)
    return min(1.0, params.beta / params.alpha * total)


def rule_si(x_state: EpidemicState, view: NeighborhoodView, profile: ImpactProfile,
            params: DiseaseParams, rho: float) -> EpidemicState:
    if x_state is S:
        if (view.weighted(_I, profile) <= view.weighted(_S, profile)
                and rho >= infection_pressure(view, profile, params)):
            return S
        return I
    if x_state is I:
        return I
    return x_state


def rule_sis(x_state: EpidemicState, view: NeighborhoodView, profile: ImpactProfile,
             params: DiseaseParams, rho: float) -> EpidemicState:
    if x_state is S:
        return rule_si(x_state, view, profile, params, rho)
    if x_state is I:
        return I if rho > params.alpha else S
    return x_state


def rule_sir(x_state: EpidemicState, view: NeighborhoodView, profile: ImpactProfile,
             params: DiseaseParams, rho: float) -> EpidemicState:
    if x_state is S:
        return rule_si(x_state, view, profile, params, rho)
    if x_state is I:
        return I if rho > params.alpha else R
    return x_state


def rule_birth_death(cell: Cell, base_rule: BaseRule, t: int, view: NeighborhoodView,
                     profile: ImpactProfile, params: DiseaseParams, draws: Draws) -> TransitionOutcome:
    """Base epidemic rule wrapped with natural death, births and aging.

    Natural death is only checked off aging steps (t not a multiple of the
    aging period); on aging steps survivors grow one unit older, capped at 100.
    """
    aging_step = t % params.aging_period == 0
    if cell.state is D:
        if draws.birth > params.birth_rate:
            return TransitionOutcome(D, 0)
        return TransitionOutcome(S, 1)
    if not aging_step and draws.natural <= band_probability(params.natural_death, cell.age):
        return TransitionOutcome(D, 0)
    new_state = base_rule(cell.state, view, profile, params, draws.epidemic)
    if aging_step:
        return TransitionOutcome(new_state, min(cell.age + 1, MAX_AGE))
    return TransitionOutcome(new_state, cell.age)


def rule_disease_death(cell: Cell, base_rule: BaseRule, t: int, view: NeighborhoodView,
                       profile: ImpactProfile, params: DiseaseParams, draws: Draws) -> TransitionOutcome:
    if cell.state is I and draws.disease <= band_probability(params.fatality, cell.age):
        return TransitionOutcome(D, 0)
    return rule_birth_death(cell, base_rule, t, view, profile, params, draws)
