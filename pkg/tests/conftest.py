import itertools

import pytest

from cellepi.core import AgeBandTable, Cell, DiseaseParams, Population, I
from cellepi.scenario import Scenario, village_preset
from cellepi.topology import ImpactProfile, InteractionGraph, set_explicit_degrees

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def enumerate_shortest_paths(n, edges):
    """Oracle: minimal path length between all pairs by exhaustive simple-path search.

    Depth-first over every simple path from each source, keeping the minimum
    length seen per target; a branch is cut once it is no shorter than the
    best path already recorded for the node it reached. Returns a dict
    (a, b) -> length for reachable pairs.
    """
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    out = {}
    for src in range(n):
        best = {src: 0}

        def walk(node, length, visited):
            for nxt in sorted(adj[node]):
                if nxt in visited:
                    continue
                if nxt in best and best[nxt] <= length + 1:
                    continue
                best[nxt] = length + 1
                walk(nxt, length + 1, visited | {nxt})

        walk(src, 0, {src})
        for dst, d in best.items():
            out[(src, dst)] = d
    return out


def random_graph(rng, max_nodes=12):
    n = int(rng.integers(1, max_nodes + 1))
    p = float(rng.uniform(0.05, 0.9))
    edges = {(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < p}
    return InteractionGraph(n, frozenset(edges))


def household_population(states, profile=None):
    """All cells share one degree-0 household; ages 30."""
    n = len(states)
    degrees = set_explicit_degrees(n, [(a, b, 0) for a in range(n) for b in range(n)])
    cells = [Cell(s, 30) for s in states]
    return Population(tuple(cells), degrees, profile or ImpactProfile({0: 1.0}))


@pytest.fixture
def village_a():
    return village_preset("village-a")


@pytest.fixture
def village_b():
    return village_preset("village-b")


@pytest.fixture
def flu_params():
    return DiseaseParams(beta=0.3, alpha=0.2)


def quiet_village(aging_period=1000, states=None) -> Scenario:
    """Village structure with zero mortality tables and a long aging period."""
    base = village_preset("village-a")
    params = DiseaseParams(beta=0.3, alpha=0.2, birth_rate=0.02,
                           natural_death=AgeBandTable.flat(0.0), fatality=AgeBandTable.flat(0.0),
                           aging_period=aging_period)
    cells = base.population.cells
    if states is not None:
        cells = tuple(Cell(s, c.age) for s, c in zip(states, cells))
    infected = frozenset(k for k, c in enumerate(cells) if c.state is I)
    return Scenario(base.population.with_cells(cells), params, infected, sites=base.sites,
                    households=base.households)
