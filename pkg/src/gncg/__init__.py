"""Network creation games on weighted host graphs.

Exact rational arithmetic throughout, except for hosts built from p-norms with
``p != 1``, which use floats with a tolerance.
"""

from __future__ import annotations

from gncg.dynamics import CycleCertificate, DynamicsTrace, cycle_search, run, verify_cycle
from gncg.equilibria import (
    EquilibriumReport,
    Move,
    approx_factors,
    best_response_exact,
    certify,
    greedy_stable_response,
    improving_single_moves,
    nash_equilibria,
)
from gncg.errors import CapExceededError, ConstraintError, GNCGError, InvalidHostError, InvalidProfileError, ParseError
from gncg.game import CostBreakdown, Network, StrategyProfile, agent_cost, distances, induced_network, social_cost, stretch
from gncg.hostgraph import HostGraph, build_general, build_one_two, check_metric, from_points, from_tree, host_shortest_paths
from gncg.optima import EdgeSet, min_weight_spanner, optimum_exact, optimum_one_two, optimum_tree, spanner_ne_ownership

__all__ = [
    "CapExceededError",
    "ConstraintError",
    "CostBreakdown",
    "CycleCertificate",
    "DynamicsTrace",
    "EdgeSet",
    "EquilibriumReport",
    "GNCGError",
    "HostGraph",
    "InvalidHostError",
    "InvalidProfileError",
    "Move",
    "Network",
    "ParseError",
    "StrategyProfile",
    "agent_cost",
    "approx_factors",
    "best_response_exact",
    "build_general",
    "build_one_two",
    "certify",
    "check_metric",
    "cycle_search",
    "distances",
    "from_points",
    "from_tree",
    "greedy_stable_response",
    "host_shortest_paths",
    "improving_single_moves",
    "induced_network",
    "min_weight_spanner",
    "nash_equilibria",
    "optimum_exact",
    "optimum_one_two",
    "optimum_tree",
    "run",
    "social_cost",
    "spanner_ne_ownership",
    "stretch",
    "verify_cycle",
]
