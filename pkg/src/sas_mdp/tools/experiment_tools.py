"""
Experiment tools for the SAS-MDP MCP server.

This module exposes SAS-Q-learning and the two reproducible experiments:
the two-state value-loss curve and the synthetic routing comparison.
"""

import logging
from dataclasses import asdict
from typing import Any, Dict, List

from sas_mdp.experiments import routing_comparison, two_state_curve
from sas_mdp.experiments.two_state import DEFAULT_P_GRID
from sas_mdp.tools.base import ToolBase
from sas_mdp.utils.errors import SasError
from sas_mdp.utils.models import CurveRequest, LearnRequest, RoutingRequest

logger = logging.getLogger(__name__)


class ExperimentTools(ToolBase):
    """Learning and experiment reproduction."""

    def get_capabilities(self) -> List[str]:
        return ["learn_q", "two_state_curve", "routing_comparison"]

    def _register_tools(self) -> None:
        @self._mcp.tool()
        async def learn_q(request: Dict[str, Any]) -> Dict[str, Any]:
            """Run tabular SAS-Q-learning on an instance.

            Args:
                request: A dictionary containing:
                    - instance (dict): Instance document
                    - steps (int, optional): Step budget (default 200000)
                    - horizon (int, optional): Steps per episode (default 100)
                    - seed (int, optional): Master seed

            Returns:
                The learned Q-table, its greedy decision lists and compressed values
            """
            try:
                parsed = self._parse_request(LearnRequest, request)
                instance = self._parse_instance(parsed.instance)
                report, _ = self._service.learn(
                    instance, steps=parsed.steps, horizon=parsed.horizon, seed=parsed.seed
                )
            except SasError as e:
                return self._error_response(e)
            return {"status": "success", "report": report.model_dump()}

        @self._mcp.tool(name="two_state_curve")
        async def two_state_curve_tool(request: Dict[str, Any]) -> Dict[str, Any]:
            """Fraction of the SAS-optimal value lost by the naive policy.

            Args:
                request: A dictionary containing:
                    - p_grid (list of float, optional): Availability probabilities of Up
                    - gamma (float, optional): Discount factor (default 0.9)

            Returns:
                One row per p with V_sas, V_naive and fraction_lost
            """
            try:
                parsed = self._parse_request(CurveRequest, request)
                points = two_state_curve(parsed.p_grid or DEFAULT_P_GRID, gamma=parsed.gamma)
            except SasError as e:
                return self._error_response(e)
            except ValueError as e:
                return {"status": "error", "code": "BadInput", "message": str(e)}
            return {"status": "success", "points": [asdict(point) for point in points]}

        @self._mcp.tool(name="routing_comparison")
        async def routing_comparison_tool(request: Dict[str, Any]) -> Dict[str, Any]:
            """Expected travel cost of SAS-optimal vs availability-oblivious routing.

            Args:
                request: A dictionary containing:
                    - p_grid (list of float, optional): Bridge availability probabilities
                    - nodes (int, optional): Columns per bank (default 3)
                    - edge_avail (float, optional): Regular road availability (default 0.5)
                    - noop_cost (float, optional): Waiting cost (default 1)
                    - seed (int, optional): Road-length seed
                    - bridge (bool, optional): Whether the bridge exists

            Returns:
                One row per p with both expected costs
            """
            try:
                parsed = self._parse_request(RoutingRequest, request)
                points = routing_comparison(
                    parsed.p_grid,
                    nodes=parsed.nodes,
                    edge_avail=parsed.edge_avail,
                    noop_cost=parsed.noop_cost,
                    seed=parsed.seed,
                    bridge=parsed.bridge,
                )
            except SasError as e:
                return self._error_response(e)
            return {
                "status": "success",
                "points": [
                    {"p": pt.p, "sas_cost": pt.sas_cost, "oblivious_cost": pt.oblivious_cost}
                    for pt in points
                ],
            }
