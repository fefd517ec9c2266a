"""Scenario definition, validation, JSON round-trip and the village generator."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .core import (I, S, AgeBandTable, Cell, DiseaseParams, EpidemicState, Population,
                   VILLAGE_FATALITY)
from .topology import (ImpactProfile, InteractionGraph, compute_impact_degrees,
                       set_explicit_degrees)


class ScenarioError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Scenario:
    population: Population
    params: DiseaseParams
    initial_infected: frozenset[int]
    step_unit: str = "day"
    sites: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    households: tuple[tuple[int, ...], ...] = ()

    @property
    def aging_period_steps(self) -> int:
        return self.params.aging_period

    @property
    def cell_count(self) -> int:
        return len(self.population)


PRESET_A = ImpactProfile({0: 1.0, 1: 0.5, 2: 0.25})
PRESET_B = ImpactProfile({0: 1.0, 1: 0.005, 2: 0.0025})
PRESETS = {"village-a": PRESET_A, "village-b": PRESET_B}
SITES = ("school", "office", "market", "hospital")


def validate(scenario: Scenario) -> list[str]:
    """Every violated scenario invariant; an empty list means valid."""
    out = []
    pop = scenario.population
    n = len(pop)
    if not scenario.initial_infected:
        out.append("initial_infected is empty")
    for x in sorted(scenario.initial_infected):
        if not 0 <= x < n:
            out.append(f"initial infected cell {x} out of range 0..{n - 1}")
        elif pop.cells[x].state is not I:
            out.append(f"initial infected cell {x} has state {pop.cells[x].state.value}")
    out += pop.profile.violations(pop.degrees.max_degree)
    out += scenario.params.violations()
    for label, members in scenario.sites.items():
        bad = [m for m in members if not 0 <= m < n]
        if bad:
            out.append(f"site {label!r} references cells out of range: {bad}")
    return out


def place_initial_infection(scenario: Scenario, site: str | Iterable[int]) -> Scenario:
    """Move patient zero: clear previous initial infections and infect ``site``.

    A label picks the lowest-index living cell of that site.
    """
    cells = list(scenario.population.cells)
    if isinstance(site, str):
        if site not in scenario.sites:
            raise ValueError(f"unknown site {site!r}; known: {sorted(scenario.sites)}")
        living = [x for x in scenario.sites[site] if cells[x].alive]
        if not living:
            raise ValueError(f"site {site!r} has no living cell")
        chosen = {min(living)}
    else:
        chosen = {int(x) for x in site}
        for x in chosen:
            if not 0 <= x < len(cells):
                raise ValueError(f"cell {x} out of range")
            if not cells[x].alive:
                raise ValueError(f"cell {x} is dead and cannot be infected")
    for x in scenario.initial_infected:
        if cells[x].state is I:
            cells[x] = Cell(S, cells[x].age)
    for x in chosen:
        cells[x] = Cell(I, cells[x].age)
    return replace(scenario, population=scenario.population.with_cells(cells),
                   initial_infected=frozenset(chosen))


@dataclass(frozen=True)
class VillageSpec:
    school_children: int = 9
    school_teachers: int = 2
    office_workers: int = 16
    market_workers: int = 8
    hospital_occupants: int = 14
    # Housing: C1 one adult, C2 two people, C3 two adults and one child.
    c1_homes: int = 10
    c2_homes: int = 6
    c2_homes_with_child: int = 0
    c3_homes: int = 9
    profile: ImpactProfile = PRESET_A
    child_ages: tuple[int, int] = (6, 15)
    worker_ages: tuple[int, int] = (20, 55)
    hospital_ages: tuple[int, int] = (20, 80)
    aging_period_steps: int = 365
    beta: float = 0.3
    alpha: float = 0.2
    birth_rate: float = 0.02
    natural_death: float = 0.005
    fatality: AgeBandTable = VILLAGE_FATALITY

    @property
    def people(self) -> int:
        return (self.school_children + self.school_teachers + self.office_workers
                + self.market_workers + self.hospital_occupants)

    def violations(self) -> list[str]:
        out = []
        if self.people != 49:
            out.append(f"occupations sum to {self.people}, not 49")
        housed = self.c1_homes + 2 * self.c2_homes + 3 * self.c3_homes
        if housed != self.people:
            out.append(f"housing mix holds {housed} people, population is {self.people}")
        if not 0 <= self.c2_homes_with_child <= self.c2_homes:
            out.append("c2_homes_with_child must lie in [0, c2_homes]")
        child_slots = self.c3_homes + self.c2_homes_with_child
        if child_slots != self.school_children:
            out.append(f"housing has {child_slots} child places for {self.school_children} children")
        if min(self.c1_homes, self.c2_homes, self.c3_homes) < 0:
            out.append("home counts must be nonnegative")
        return out


def build_village(spec: VillageSpec = VillageSpec(), seed: int = 0) -> Scenario:
    """Village population: degree 0 at home, 1 at work, 2 with everyone else.

    Cells are ordered by site (children, teachers, office, market, hospital);
    households and ages are drawn from ``seed``. Patient zero is the first
    hospital cell.
    """
    problems = spec.violations()
    if problems:
        raise ScenarioError(problems)
    rng = np.random.default_rng(seed)

    n_child = spec.school_children
    site_sizes = [("school", n_child + spec.school_teachers), ("office", spec.office_workers),
                  ("market", spec.market_workers), ("hospital", spec.hospital_occupants)]
    sites, start = {}, 0
    for label, size in site_sizes:
        sites[label] = tuple(range(start, start + size))
        start += size
    n = start
    children = list(range(n_child))
    adults = list(range(n_child, n))

    ages = np.zeros(n, dtype=np.int64)
    ages[:n_child] = rng.integers(spec.child_ages[0], spec.child_ages[1] + 1, size=n_child)
    non_hospital = n - spec.hospital_occupants
    ages[n_child:non_hospital] = rng.integers(spec.worker_ages[0], spec.worker_ages[1] + 1,
                                              size=non_hospital - n_child)
    ages[non_hospital:] = rng.integers(spec.hospital_ages[0], spec.hospital_ages[1] + 1,
                                       size=spec.hospital_occupants)

    adult_order = [int(a) for a in rng.permutation(adults)]
    child_order = [int(c) for c in rng.permutation(children)]
    households = []
    for _ in range(spec.c3_homes):
        households.append((adult_order.pop(), adult_order.pop(), child_order.pop()))
    for _ in range(spec.c2_homes_with_child):
        households.append((adult_order.pop(), child_order.pop()))
    for _ in range(spec.c2_homes - spec.c2_homes_with_child):
        households.append((adult_order.pop(), adult_order.pop()))
    for _ in range(spec.c1_homes):
        households.append((adult_order.pop(),))
    assert not adult_order and not child_order
    households = tuple(tuple(sorted(h)) for h in households)

    deg = np.full((n, n), 2, dtype=np.int64)
    for members in sites.values():
        deg[np.ix_(members, members)] = 1
    for members in households:
        deg[np.ix_(members, members)] = 0
    np.fill_diagonal(deg, 0)
    degrees = set_explicit_degrees(n, ((a, b, deg[a, b]) for a in range(n) for b in range(n)))

    cells = tuple(Cell(S, int(a)) for a in ages)
    params = DiseaseParams(
        beta=spec.beta, alpha=spec.alpha, birth_rate=spec.birth_rate,
        natural_death=AgeBandTable.flat(spec.natural_death), fatality=spec.fatality,
        aging_period=spec.aging_period_steps, mu=spec.natural_death, theta=0.0,
    )
    base = Scenario(Population(cells, degrees, spec.profile), params, frozenset(),
                    step_unit="day", sites=sites, households=households)
    return place_initial_infection(base, "hospital")


def village_preset(name: str, seed: int = 0, site: str = "hospital") -> Scenario:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    scenario = build_village(VillageSpec(profile=PRESETS[name]), seed)
    return scenario if site == "hospital" else place_initial_infection(scenario, site)


def _table_to_list(table: AgeBandTable) -> list:
    return [[lo, hi, p] for lo, hi, p in table.bands]


def scenario_to_dict(scenario: Scenario) -> dict:
    pop = scenario.population
    m = pop.degrees.matrix
    n = len(pop)
    p = scenario.params
    explicit = [[a, b, int(m[a, b])] for a in range(n) for b in range(n) if a != b and m[a, b] >= 0]
    return {
        "cells": [{"id": k, "age": c.age, "state": c.state.value} for k, c in enumerate(pop.cells)],
        "degrees": {"explicit": explicit},
        "profile": {str(g): r for g, r in sorted(pop.profile.rates.items())},
        "params": {
            "beta": p.beta, "alpha": p.alpha, "birth_rate": p.birth_rate, "mu": p.mu,
            "theta": p.theta, "aging_period": p.aging_period,
            "natural_death": _table_to_list(p.natural_death),
            "fatality": _table_to_list(p.fatality),
        },
        "initial_infected": sorted(scenario.initial_infected),
        "step_unit": scenario.step_unit,
        "sites": {label: list(members) for label, members in scenario.sites.items()},
    }


def scenario_from_dict(doc: Mapping) -> Scenario:
    """Parse the JSON scenario document. Raises ScenarioError on malformed input."""
    try:
        ids = [c["id"] for c in doc["cells"]]
        if len(set(ids)) != len(ids):
            raise ScenarioError(["duplicate cell ids"])
        pos = {cid: k for k, cid in enumerate(ids)}

        def index(cid):
            if cid not in pos:
                raise ScenarioError([f"unknown cell id {cid!r}"])
            return pos[cid]

        n = len(ids)
        cells = tuple(Cell(EpidemicState(c["state"]), int(c["age"])) for c in doc["cells"])
        degrees_doc = doc["degrees"]
        if "graph" in degrees_doc and "explicit" in degrees_doc:
            raise ScenarioError(["degrees must give either 'graph' or 'explicit', not both"])
        if "graph" in degrees_doc:
            edges = frozenset((index(a), index(b)) for a, b in degrees_doc["graph"])
            degrees = compute_impact_degrees(InteractionGraph(n, edges))
        elif "explicit" in degrees_doc:
            degrees = set_explicit_degrees(n, ((index(a), index(b), g) for a, b, g in degrees_doc["explicit"]))
        else:
            raise ScenarioError(["degrees needs a 'graph' or 'explicit' entry"])
        profile = ImpactProfile({int(g): float(r) for g, r in doc["profile"].items()})
        pd = doc["params"]
        params = DiseaseParams(
            beta=float(pd["beta"]), alpha=float(pd["alpha"]),
            birth_rate=float(pd.get("birth_rate", 0.0)),
            natural_death=AgeBandTable(tuple(pd.get("natural_death", [[1, 100, 0.0]]))),
            fatality=AgeBandTable(tuple(pd.get("fatality", [[1, 100, 0.0]]))),
            aging_period=int(pd.get("aging_period", 1)),
            mu=float(pd.get("mu", 0.0)), theta=float(pd.get("theta", 0.0)),
        )
        infected = frozenset(index(cid) for cid in doc["initial_infected"])
        sites = {str(k): tuple(index(cid) for cid in v) for k, v in doc.get("sites", {}).items()}
        return Scenario(Population(cells, degrees, profile), params, infected,
                        step_unit=str(doc.get("step_unit", "day")), sites=sites)
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        detail = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        raise ScenarioError([f"malformed scenario: {detail}"]) from exc


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError([f"invalid JSON: {exc}"]) from exc
    return scenario_from_dict(doc)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=1)
        fh.write("\n")
