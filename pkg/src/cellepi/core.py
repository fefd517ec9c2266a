"""Domain types: states, cells, populations, age-banded tables and disease parameters."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .topology import ImpactDegreeMap, ImpactProfile

MIN_AGE = 1
MAX_AGE = 100


class EpidemicState(str, enum.Enum):
    SUSCEPTIBLE = "S"
    INFECTED = "I"
    RECOVERED = "R"
    # Also marks an empty slot waiting for a birth.
    DEAD = "D"

    @property
    def index(self) -> int:
        return _STATE_INDEX[self]


S = EpidemicState.SUSCEPTIBLE
I = EpidemicState.INFECTED
R = EpidemicState.RECOVERED
D = EpidemicState.DEAD
STATES = (S, I, R, D)
_STATE_INDEX = {s: k for k, s in enumerate(STATES)}


@dataclass(frozen=True)
class Cell:
    state: EpidemicState
    age: int

    def __post_init__(self):
        object.__setattr__(self, "state", EpidemicState(self.state))
        if self.state is D:
            if self.age != 0:
                raise ValueError(f"dead cell must have age 0, got {self.age}")
        elif not MIN_AGE <= self.age <= MAX_AGE:
            raise ValueError(f"living cell age {self.age} outside [{MIN_AGE}, {MAX_AGE}]")

    @property
    def alive(self) -> bool:
        return self.state is not D


@dataclass(frozen=True)
class AgeBandTable:
    """Piecewise-constant probability over ages 1..100.

    ``bands`` is a sequence of ``(lo, hi, probability)`` with inclusive ranges.
    """

    bands: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple((int(lo), int(hi), float(p)) for lo, hi, p in self.bands))

    @classmethod
    def flat(cls, probability: float) -> "AgeBandTable":
        return cls(((MIN_AGE, MAX_AGE, probability),))

    def violations(self) -> list[str]:
        out = []
        covered = [0] * (MAX_AGE + 1)
        for lo, hi, p in self.bands:
            if not 0.0 <= p <= 1.0:
                out.append(f"band [{lo},{hi}] probability {p} outside [0,1]")
            if lo > hi or lo < MIN_AGE or hi > MAX_AGE:
                out.append(f"band [{lo},{hi}] is not a range within [{MIN_AGE},{MAX_AGE}]")
                continue
            for a in range(lo, hi + 1):
                covered[a] += 1
        gaps = [a for a in range(MIN_AGE, MAX_AGE + 1) if covered[a] == 0]
        overlaps = [a for a in range(MIN_AGE, MAX_AGE + 1) if covered[a] > 1]
        if gaps:
            out.append(f"ages not covered by any band: {_ranges(gaps)}")
        if overlaps:
            out.append(f"ages covered by more than one band: {_ranges(overlaps)}")
        return out

    def lookup(self) -> tuple[float, ...]:
        """Dense table indexed by age (index 0 unused)."""
        dense = [0.0] * (MAX_AGE + 1)
        for age in range(MIN_AGE, MAX_AGE + 1):
            dense[age] = band_probability(self, age)
        return tuple(dense)


def _ranges(ages: Sequence[int]) -> str:
    parts, start, prev = [], ages[0], ages[0]
    for a in list(ages[1:]) + [None]:
        if a is not None and a == prev + 1:
            prev = a
            continue
        parts.append(str(start) if start == prev else f"{start}-{prev}")
        if a is not None:
            start = prev = a
    return ", ".join(parts)


def band_probability(table: AgeBandTable, age: int) -> float:
    if not MIN_AGE <= age <= MAX_AGE:
        raise ValueError(f"age {age} outside [{MIN_AGE}, {MAX_AGE}]")
    for lo, hi, p in table.bands:
        if lo <= age <= hi:
            return p
    raise ValueError(f"age {age} not covered by any band")


# Case fatality by age for the village flu outbreak.
VILLAGE_FATALITY = AgeBandTable(((1, 15, 0.005), (16, 48, 0.01), (49, 55, 0.1), (56, 100, 0.25)))


@dataclass(frozen=True)
class DiseaseParams:
    """Rates driving the evolution rules.

    ``mu`` and ``theta`` only feed the ODE reference models and R0; the
    automaton uses the age-banded ``natural_death`` and ``fatality`` tables.
    """

    beta: float
    alpha: float
    birth_rate: float = 0.0
    natural_death: AgeBandTable = field(default_factory=lambda: AgeBandTable.flat(0.0))
    fatality: AgeBandTable = field(default_factory=lambda: AgeBandTable.flat(0.0))
    aging_period: int = 1
    mu: float = 0.0
    theta: float = 0.0

    def violations(self) -> list[str]:
        out = []
        for name in ("beta", "birth_rate", "mu", "theta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                out.append(f"{name}={v} outside [0,1]")
        if not 0.0 < self.alpha <= 1.0:
            out.append(f"alpha={self.alpha} outside (0,1]")
        if int(self.aging_period) != self.aging_period or self.aging_period < 1:
            out.append(f"aging_period={self.aging_period} must be a positive integer")
        out += [f"natural_death: {v}" for v in self.natural_death.violations()]
        out += [f"fatality: {v}" for v in self.fatality.violations()]
        return out


@dataclass(frozen=True)
class Population:
    """The cell space: cells in fixed positions plus their impact structure."""

    cells: tuple[Cell, ...]
    degrees: ImpactDegreeMap
    profile: ImpactProfile

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        if len(self.cells) != self.degrees.cell_count:
            raise ValueError(f"{len(self.cells)} cells but degree map covers {self.degrees.cell_count}")

    def __len__(self):
        return len(self.cells)

    def with_cells(self, cells: Sequence[Cell]) -> "Population":
        return Population(tuple(cells), self.degrees, self.profile)


def state_counts(population: Population) -> tuple[int, int, int, int]:
    """Number of (S, I, R, D) cells."""
    counts = [0, 0, 0, 0]
    for cell in population.cells:
        counts[cell.state.index] += 1
    return tuple(counts)
