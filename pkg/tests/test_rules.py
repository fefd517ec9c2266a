import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from cellepi.core import D, I, R, S, AgeBandTable, Cell, DiseaseParams
from cellepi.engine import degree_masks
from cellepi.rules import (Draws, NeighborhoodView, infection_pressure, neighborhood_view,
                           rule_birth_death, rule_disease_death, rule_si, rule_sir, rule_sis,
                           views_from_arrays)
from cellepi.topology import ImpactProfile

from conftest import household_population
from rule_fixtures import BRANCHES

PROFILE0 = ImpactProfile({0: 1.0})


def count_view(population, x):
    """Oracle: direct per-degree tally over the degree matrix."""
    m = population.degrees.matrix
    g_max = population.degrees.max_degree
    sigma = [[0] * 4 for _ in range(g_max + 1)]
    for y, cell in enumerate(population.cells):
        if y != x and m[x, y] >= 0:
            sigma[m[x, y]]["SIRD".index(cell.state.value)] += 1
    return sigma


def test_view_both_cohabitants_infected():
    view = neighborhood_view(household_population([S, I, I]), 0)
    assert view.sigma[0][1] == 2
    assert view.delta[0] == 2


def test_view_one_s_one_i():
    view = neighborhood_view(household_population([S, S, I]), 0)
    assert view.sigma[0] == (1, 1, 0, 0)
    assert view.delta[0] == 2


def test_view_isolated_cell():
    pop = household_population([S])
    view = neighborhood_view(pop, 0)
    assert all(d == 0 for d in view.delta)
    assert infection_pressure(view, PROFILE0, DiseaseParams(0.3, 0.2)) == 0.0


def test_view_counts_dead_in_delta():
    pop = household_population([S, I, I])
    pop = pop.with_cells((pop.cells[0], Cell(D, 0), pop.cells[2]))
    view = neighborhood_view(pop, 0)
    assert view.sigma[0] == (0, 1, 0, 1)
    assert view.delta[0] == 2


def test_vectorised_views_match_direct_count(village_a):
    pop = village_a.population
    rng = np.random.default_rng(3)
    states = rng.integers(0, 4, size=len(pop))
    cells = tuple(Cell(["S", "I", "R", "D"][s], 0 if s == 3 else 30) for s in states)
    pop = pop.with_cells(cells)
    sigma, delta = views_from_arrays(degree_masks(pop), states)
    for x in range(len(pop)):
        expected = count_view(pop, x)
        assert sigma[x].tolist() == expected
        assert neighborhood_view(pop, x).sigma == tuple(map(tuple, expected))
        assert delta[x].tolist() == [sum(c) for c in expected]


def test_view_rejects_inconsistent_counts():
    with pytest.raises(ValueError):
        NeighborhoodView(((1, 1, 0, 0),), (3,))


def test_pressure_empty():
    view = NeighborhoodView(((3, 0, 0, 0), (4, 0, 1, 0)), (3, 5))
    assert infection_pressure(view, ImpactProfile({0: 1, 1: 1}), DiseaseParams(0.3, 0.2)) == 0.0


def test_pressure_single_class():
    view = NeighborhoodView(((1, 1, 0, 0),), (2,))
    # 0.3 / 0.2 * (1 / 2) * 1
    assert infection_pressure(view, PROFILE0, DiseaseParams(0.3, 0.2)) == pytest.approx(0.75)


def test_pressure_clamped():
    view = NeighborhoodView(((1, 1, 0, 0), (5, 5, 0, 0)), (2, 10))
    profile = ImpactProfile({0: 1.0, 1: 0.5})
    raw = 0.3 / 0.2 * (1 / 2 * 1.0 + 5 / 10 * 0.5)
    assert raw == pytest.approx(1.125)
    assert infection_pressure(view, profile, DiseaseParams(0.3, 0.2)) == 1.0


def test_pressure_skips_empty_degree_classes():
    view = NeighborhoodView(((0, 0, 0, 0), (1, 1, 0, 0)), (0, 2))
    profile = ImpactProfile({0: 1.0, 1: 0.5})
    assert infection_pressure(view, profile, DiseaseParams(0.3, 0.2)) == pytest.approx(1.5 * 0.5 * 0.5)


@pytest.mark.parametrize("branch, run, expected", BRANCHES, ids=[b[0] for b in BRANCHES])
def test_rule_branches(branch, run, expected):
    assert run() == expected


def test_si_no_infected_any_draw():
    view = NeighborhoodView(((2, 0, 0, 0), (10, 0, 3, 1)), (2, 14))
    profile = ImpactProfile({0: 1, 1: 0.5})
    for rho in (0.0, 0.3, 1.0):
        assert rule_si(S, view, profile, DiseaseParams(0.3, 0.2), rho) is S


def test_sis_certain_recovery():
    view = NeighborhoodView(((0, 2, 0, 0),), (2,))
    for rho in np.linspace(0, 1, 11):
        assert rule_sis(I, view, PROFILE0, DiseaseParams(0.3, 1.0), rho) is S


# property tests -----------------------------------------------------------

@st.composite
def views(draw, max_degree=3, max_count=6):
    g = draw(st.integers(1, max_degree + 1))
    sigma = tuple(tuple(draw(st.integers(0, max_count)) for _ in range(4)) for _ in range(g))
    return NeighborhoodView(sigma, tuple(sum(c) for c in sigma))


@st.composite
def profiles(draw, max_degree=3):
    return ImpactProfile({g: draw(st.floats(0, 1)) for g in range(max_degree + 1)})


rates = st.floats(0, 1)
alphas = st.floats(0.01, 1)
unit = st.floats(0, 1)
ages = st.integers(1, 100)
states = st.sampled_from([S, I, R, D])


@settings(max_examples=300, deadline=None)
@given(views(), profiles(), alphas, unit)
def test_beta_zero_never_infects_when_susceptible_outweigh(view, profile, alpha, rho):
    params = DiseaseParams(0.0, alpha)
    assert infection_pressure(view, profile, params) == 0.0
    assume(view.weighted(1, profile) <= view.weighted(0, profile))
    assert rule_si(S, view, profile, params, rho) is S


def test_beta_zero_random_views_bulk():
    rng = np.random.default_rng(11)
    profile = ImpactProfile({0: 1.0, 1: 0.5, 2: 0.25})
    params = DiseaseParams(0.0, 0.2)
    transitions = checked = 0
    for _ in range(10_000):
        sigma = tuple(tuple(int(v) for v in rng.integers(0, 6, size=4)) for _ in range(3))
        view = NeighborhoodView(sigma, tuple(sum(c) for c in sigma))
        if view.weighted(1, profile) > view.weighted(0, profile):
            continue
        checked += 1
        transitions += rule_si(S, view, profile, params, float(rng.random())) is I
    assert checked > 1000
    assert transitions == 0


@settings(max_examples=300, deadline=None)
@given(views(), profiles(), rates, alphas, unit, unit)
def test_rule_ranges(view, profile, beta, alpha, rho, _):
    params = DiseaseParams(beta, alpha)
    p = infection_pressure(view, profile, params)
    assert 0.0 <= p <= 1.0
    assert rule_sir(R, view, profile, params, rho) is R
    assert rule_sis(S, view, profile, params, rho) in (S, I)
    assert rule_sis(I, view, profile, params, rho) in (S, I)
    assert rule_sir(S, view, profile, params, rho) in (S, I)
    assert rule_sir(I, view, profile, params, rho) in (I, R)


@settings(max_examples=200, deadline=None)
@given(views(), profiles(), rates, alphas)
def test_dead_cells_never_infect(view, profile, beta, alpha):
    params = DiseaseParams(beta, alpha)
    # replacing dead neighbors by recovered ones leaves the pressure unchanged
    swapped = NeighborhoodView(tuple((s, i, r + d, 0) for s, i, r, d in view.sigma), view.delta)
    assert infection_pressure(view, profile, params) == infection_pressure(swapped, profile, params)


@settings(max_examples=300, deadline=None)
@given(states, ages, st.integers(1, 60), st.integers(1, 10), views(), profiles(),
       st.tuples(unit, unit, unit, unit), unit, unit)
def test_age_monotone_and_aging_step(state, age, t, period, view, profile, d, omega, birth):
    params = DiseaseParams(0.3, 0.2, birth_rate=birth, natural_death=AgeBandTable.flat(omega),
                           aging_period=period)
    cell = Cell(state, 0 if state is D else age)
    out = rule_birth_death(cell, rule_sir, t, view, profile, params, Draws(*d))
    Cell(out.new_state, out.new_age)  # outcome obeys cell invariants
    if state is not D and out.new_state is not D:
        if t % period == 0:
            assert out.new_age == min(age + 1, 100)
        else:
            assert out.new_age == age


@settings(max_examples=300, deadline=None)
@given(states, ages, st.integers(1, 60), st.integers(1, 10), views(), profiles(),
       st.tuples(unit, unit, unit, unit), unit)
def test_zero_fatality_equals_vital_rule(state, age, t, period, view, profile, d, omega):
    params = DiseaseParams(0.3, 0.2, birth_rate=0.02, natural_death=AgeBandTable.flat(omega),
                           fatality=AgeBandTable.flat(0.0), aging_period=period)
    cell = Cell(state, 0 if state is D else age)
    for base in (rule_sis, rule_sir):
        a = rule_disease_death(cell, base, t, view, profile, params, Draws(*d))
        b = rule_birth_death(cell, base, t, view, profile, params, Draws(*d))
        # a disease draw of exactly 0 still satisfies rho <= 0 (probability-zero event)
        if not (state is I and d[0] == 0.0):
            assert a == b


@settings(max_examples=300, deadline=None)
@given(states, ages, st.integers(1, 60), views(), profiles(), st.tuples(unit, unit, unit, unit))
def test_susceptible_cells_bypass_fatality(state, age, t, view, profile, d):
    assume(state is not I)
    params = DiseaseParams(0.3, 0.2, birth_rate=0.02, natural_death=AgeBandTable.flat(0.01),
                           fatality=AgeBandTable.flat(1.0), aging_period=5)
    cell = Cell(state, 0 if state is D else age)
    assert (rule_disease_death(cell, rule_sir, t, view, profile, params, Draws(*d))
            == rule_birth_death(cell, rule_sir, t, view, profile, params, Draws(*d)))
