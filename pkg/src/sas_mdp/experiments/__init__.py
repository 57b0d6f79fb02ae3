"""Experiments: the two-state value-loss curve and synthetic routing."""

from sas_mdp.experiments.baselines import oblivious_policy, possible_actions
from sas_mdp.experiments.routing import (
    RoutingPoint,
    RoutingProblem,
    build_road_graph,
    build_routing_problem,
    compare_policies,
    routing_comparison,
)
from sas_mdp.experiments.two_state import CurvePoint, curve_point, two_state_curve

__all__ = [
    "CurvePoint",
    "RoutingPoint",
    "RoutingProblem",
    "build_road_graph",
    "build_routing_problem",
    "compare_policies",
    "curve_point",
    "oblivious_policy",
    "possible_actions",
    "routing_comparison",
    "two_state_curve",
]
