"""Microgrid restoration of distribution networks with drone small cells
restoring communication to remotely controlled switches."""

from .coverage import CandidateSet, euclidean_distance, fleet_candidates, is_covered, pick_big_m
from .grid import Scenario, apply_damage, load_scenario, parse_scenario, validate
from .oracle import brute_force
from .plan import RestorationPlan
from .powerflow import forward_sweep, verify_plan
from .strategies import STRATEGIES, run_compare, run_strategy

__all__ = [
    "CandidateSet",
    "RestorationPlan",
    "STRATEGIES",
    "Scenario",
    "apply_damage",
    "brute_force",
    "euclidean_distance",
    "fleet_candidates",
    "forward_sweep",
    "is_covered",
    "load_scenario",
    "parse_scenario",
    "pick_big_m",
    "run_compare",
    "run_strategy",
    "validate",
]

__version__ = "0.1.0"
