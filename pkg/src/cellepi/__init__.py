"""Cellular-automaton epidemics over impact-degree neighborhoods."""
from .core import (AgeBandTable, Cell, DiseaseParams, EpidemicState, Population, VILLAGE_FATALITY,
                   band_probability, state_counts)
from .engine import (BatchResult, DrawStream, Model, SimulationConfig, Summary, TimeSeries,
                     batch_simulate, simulate, step, summarize)
from .reference import CompartmentState, integrate, r0_sir, r0_sis, sir_derivative, sis_derivative
from .scenario import (PRESET_A, PRESET_B, Scenario, ScenarioError, VillageSpec, build_village,
                       load_scenario, place_initial_infection, save_scenario, validate, village_preset)
from .topology import (ImpactDegreeMap, ImpactProfile, InteractionGraph, compute_impact_degrees,
                       neighborhood_set, set_explicit_degrees)

__version__ = "0.1.0"

__all__ = [
    "AgeBandTable",
    "Cell",
    "DiseaseParams",
    "EpidemicState",
    "Population",
    "VILLAGE_FATALITY",
    "band_probability",
    "state_counts",
    "BatchResult",
    "DrawStream",
    "Model",
    "SimulationConfig",
    "Summary",
    "TimeSeries",
    "batch_simulate",
    "simulate",
    "step",
    "summarize",
    "CompartmentState",
    "integrate",
    "r0_sir",
    "r0_sis",
    "sir_derivative",
    "sis_derivative",
    "PRESET_A",
    "PRESET_B",
    "Scenario",
    "ScenarioError",
    "VillageSpec",
    "build_village",
    "load_scenario",
    "place_initial_infection",
    "save_scenario",
    "validate",
    "village_preset",
    "ImpactDegreeMap",
    "ImpactProfile",
    "InteractionGraph",
    "compute_impact_degrees",
    "neighborhood_set",
    "set_explicit_degrees",
]
