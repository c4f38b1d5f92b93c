"""Evolutionary generation of two-player Risk variants.

The pipeline: a parameterized match engine (`engine`) playtested by a fast
rule-based agent (`agent`), scored by seven quality criteria and a distance
fitness (`metrics`), evolved with a genetic algorithm over rule attributes
and planar continent maps (`evolution`), with experiment orchestration and a
command line interface (`harness`, `cli`).
"""

from riskgen.mapmodel import (
    Continent,
    MapGraph,
    ValidationReport,
    are_isomorphic,
    export_dot,
    is_planar,
    load_map,
    save_map,
    seed_maps,
    validate_map,
)
from riskgen.engine import GameParams, GameState, new_game
from riskgen.metrics import CriteriaVector, OptimalTargets, criteria_from_records, fitness
from riskgen.playtest import play_match, run_playtest
from riskgen.evolution import GAConfig, Individual, run

__all__ = [
    "Continent",
    "MapGraph",
    "ValidationReport",
    "are_isomorphic",
    "export_dot",
    "is_planar",
    "load_map",
    "save_map",
    "seed_maps",
    "validate_map",
    "GameParams",
    "GameState",
    "new_game",
    "CriteriaVector",
    "OptimalTargets",
    "criteria_from_records",
    "fitness",
    "play_match",
    "run_playtest",
    "GAConfig",
    "Individual",
    "run",
]

__version__ = "0.1.0"
