"""Synthetic routing with an unreliable bridge.

The road network is a two-bank ladder. Each bank is a row of ``nodes``
intersections joined by two-way roads; the banks are joined by a detour
crossing at the far end and by a bridge at the source end that leads
straight to the destination. Every road is usable at a given step only
with its availability probability; the bridge has probability p. Waiting
is always possible at a fixed cost.

Travel costs are negative rewards with discount 0.999 standing in for
expected travel time; the destination is absorbing and free.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List

import networkx as nx
import numpy as np

from sas_mdp.core.availability import PdaAvailability
from sas_mdp.core.mdp import BaseMdp
from sas_mdp.core.validation import ValidatedInstance, validate
from sas_mdp.experiments.baselines import oblivious_policy
from sas_mdp.solve.policy_iteration import policy_evaluation
from sas_mdp.solve.value_iteration import value_iteration
from sas_mdp.utils.errors import DisconnectedGraphError

logger = logging.getLogger(__name__)

WAIT, LEFT, RIGHT, CROSS = 0, 1, 2, 3
ACTION_NAMES = ["wait", "left", "right", "cross"]
ROUTING_DISCOUNT = 0.999


@dataclass(frozen=True)
class RoutingProblem:
    """A generated road network and its SAS-MDP."""

    graph: nx.DiGraph
    instance: ValidatedInstance
    source: int
    destination: int


def build_road_graph(
    nodes: int,
    bridge_prob: float,
    edge_avail: float = 0.5,
    seed: int = 0,
    bridge: bool = True,
) -> nx.DiGraph:
    """Road network with ``length``, ``availability`` and ``action`` edge attributes.

    Node j is column j of the near bank and node ``nodes + j`` column j of
    the far bank. Lengths are drawn from [1, 1.5) with ``seed``; the bridge
    has length 1.
    """
    if nodes < 2:
        raise ValueError(f"The ladder needs at least 2 columns, got {nodes}")
    rng = np.random.default_rng(seed)
    graph = nx.DiGraph()
    graph.add_nodes_from(range(2 * nodes))
    for bank in (0, nodes):
        for j in range(nodes - 1):
            u, v = bank + j, bank + j + 1
            length = float(rng.uniform(1.0, 1.5))
            graph.add_edge(u, v, length=length, availability=edge_avail, action=RIGHT)
            graph.add_edge(v, u, length=length, availability=edge_avail, action=LEFT)
    near_end, far_end = nodes - 1, 2 * nodes - 1
    length = float(rng.uniform(1.0, 1.5))
    graph.add_edge(near_end, far_end, length=length, availability=edge_avail, action=CROSS)
    graph.add_edge(far_end, near_end, length=length, availability=edge_avail, action=CROSS)
    if bridge:
        graph.add_edge(0, nodes, length=1.0, availability=bridge_prob, action=CROSS)
        graph.add_edge(nodes, 0, length=1.0, availability=bridge_prob, action=CROSS)
    return graph


def _check_connected(graph: nx.DiGraph) -> None:
    usable = nx.DiGraph()
    usable.add_nodes_from(graph.nodes)
    usable.add_edges_from(
        (u, v) for u, v, rho in graph.edges(data="availability") if rho > 0.0
    )
    if not nx.is_strongly_connected(usable):
        components = [sorted(c) for c in nx.strongly_connected_components(usable)]
        raise DisconnectedGraphError(
            "Road network is not strongly connected",
            {"components": components},
        )


def build_routing_problem(
    nodes: int = 3,
    bridge_prob: float = 0.5,
    edge_avail: float = 0.5,
    noop_cost: float = 1.0,
    seed: int = 0,
    bridge: bool = True,
) -> RoutingProblem:
    """Generate the road network and its SAS-MDP.

    Actions are wait, left, right and cross. A move with no road has
    availability 0, stays put and costs ``noop_cost`` like waiting.

    Raises:
        DisconnectedGraphError: If usable roads do not connect every node
    """
    graph = build_road_graph(nodes, bridge_prob, edge_avail, seed=seed, bridge=bridge)
    _check_connected(graph)
    n, m = graph.number_of_nodes(), len(ACTION_NAMES)
    source, destination = 0, nodes

    transitions = np.zeros((n, m, n))
    transitions[np.arange(n), :, np.arange(n)] = 1.0
    rewards = np.full((n, m), -noop_cost)
    rho = np.zeros((n, m))
    rho[:, WAIT] = 1.0
    for u, v, data in graph.edges(data=True):
        k = data["action"]
        transitions[u, k] = 0.0
        transitions[u, k, v] = 1.0
        rewards[u, k] = -data["length"]
        rho[u, k] = data["availability"]

    transitions[destination] = 0.0
    transitions[destination, :, destination] = 1.0
    rewards[destination] = 0.0

    names = [f"near{j}" for j in range(nodes)] + [f"far{j}" for j in range(nodes)]
    mdp = BaseMdp(
        n_states=n,
        n_actions=m,
        transitions=transitions,
        rewards=rewards,
        discount=ROUTING_DISCOUNT,
        state_names=names,
        action_labels=[list(ACTION_NAMES) for _ in range(n)],
    )
    instance = validate(mdp, PdaAvailability(rho=rho))
    return RoutingProblem(graph=graph, instance=instance, source=source, destination=destination)


@dataclass(frozen=True)
class RoutingPoint:
    """Expected discounted cost from the source under both policies."""

    p: float
    sas_cost: float
    oblivious_cost: float

    @property
    def gap(self) -> float:
        return self.oblivious_cost - self.sas_cost


def compare_policies(problem: RoutingProblem, eps: float = 1e-9) -> RoutingPoint:
    """Evaluate the SAS-optimal and the oblivious DL exactly at the source."""
    mdp, avail = problem.instance.mdp, problem.instance.availability
    optimal = value_iteration(mdp, avail, eps=eps, max_iters=200_000)
    sas_values = policy_evaluation(mdp, avail, optimal.policy)
    oblivious = oblivious_policy(mdp, avail, eps=eps)
    oblivious_values = policy_evaluation(mdp, avail, oblivious)
    bridge = problem.graph.get_edge_data(problem.source, problem.destination)
    return RoutingPoint(
        p=float(bridge["availability"]) if bridge else 0.0,
        sas_cost=float(-sas_values[problem.source]),
        oblivious_cost=float(-oblivious_values[problem.source]),
    )


def routing_comparison(
    p_grid: Iterable[float],
    nodes: int = 3,
    edge_avail: float = 0.5,
    noop_cost: float = 1.0,
    seed: int = 0,
    bridge: bool = True,
    eps: float = 1e-9,
) -> List[RoutingPoint]:
    """:func:`compare_policies` for every bridge probability in ``p_grid``.

    The same seed gives the same road lengths at every p. Without the
    bridge a single point is returned with p = 0.
    """
    grid = list(p_grid) if bridge else [0.0]
    points = []
    for p in grid:
        problem = build_routing_problem(
            nodes=nodes,
            bridge_prob=float(p),
            edge_avail=edge_avail,
            noop_cost=noop_cost,
            seed=seed,
            bridge=bridge,
        )
        point = compare_policies(problem, eps=eps)
        logger.info(
            f"p={point.p:.3f}: SAS cost {point.sas_cost:.6f}, "
            f"oblivious cost {point.oblivious_cost:.6f}"
        )
        points.append(point)
    return points
