"""
Solver tools for the SAS-MDP MCP server.

This module exposes the exact solvers: solving an instance document,
cross-checking against the embedded-MDP oracle, and the value-iteration
iteration bound.
"""

import logging
from typing import Any, Dict, List

from sas_mdp.core.instance_io import InstanceDocument
from sas_mdp.tools.base import ToolBase
from sas_mdp.utils.errors import SasError
from sas_mdp.utils.models import IterationBoundRequest, SolveRequest

logger = logging.getLogger(__name__)


class SolverTools(ToolBase):
    """Exact SAS-MDP solvers."""

    def get_capabilities(self) -> List[str]:
        return ["solve_instance", "oracle_check", "iteration_bound"]

    def _register_resources(self) -> None:
        @self._mcp.resource("sas://instance-schema")
        def instance_schema() -> Dict[str, Any]:
            """JSON schema of instance documents."""
            return InstanceDocument.model_json_schema()

    def _register_tools(self) -> None:
        @self._mcp.tool()
        async def solve_instance(request: Dict[str, Any]) -> Dict[str, Any]:
            """Solve an SAS-MDP instance.

            Args:
                request: A dictionary containing:
                    - instance (dict): Instance document
                    - solver (str, optional): vi, pi, lp or embedded (default vi)
                    - eps (float, optional): Value-iteration precision
                    - tol (float, optional): LP violation tolerance
                    - oracle (bool, optional): Cross-check against the embedded MDP

            Returns:
                Per-state optimal values and decision lists with solver statistics
            """
            try:
                parsed = self._parse_request(SolveRequest, request)
                instance = self._parse_instance(parsed.instance)
                report = self._service.solve(
                    instance,
                    solver=parsed.solver,
                    eps=parsed.eps,
                    tol=parsed.tol,
                    oracle=parsed.oracle,
                )
            except SasError as e:
                return self._error_response(e)
            return {"status": "success", "report": report.model_dump()}

        @self._mcp.tool()
        async def oracle_check(request: Dict[str, Any]) -> Dict[str, Any]:
            """Compare a compressed solver against the embedded-MDP oracle.

            Args:
                request: A dictionary containing:
                    - instance (dict): Instance document with at most 14 actions
                    - solver (str, optional): vi, pi or lp (default vi)

            Returns:
                The largest absolute value difference over states
            """
            try:
                parsed = self._parse_request(SolveRequest, request)
                instance = self._parse_instance(parsed.instance)
                report = self._service.solve(
                    instance, solver=parsed.solver, eps=parsed.eps, tol=parsed.tol, oracle=True
                )
            except SasError as e:
                return self._error_response(e)
            return {
                "status": "success",
                "solver": report.solver,
                "max_abs_diff": report.oracle_max_diff,
            }

        @self._mcp.tool()
        async def iteration_bound(request: Dict[str, Any]) -> Dict[str, Any]:
            """Iterations after which value iteration's greedy DL is optimal.

            Args:
                request: A dictionary containing:
                    - instance (dict): PDA instance document
                    - delta (int): Common denominator of every instance number

            Returns:
                The bound; on overflow the error details carry its natural-log form
            """
            try:
                parsed = self._parse_request(IterationBoundRequest, request)
                instance = self._parse_instance(parsed.instance)
                bound = self._service.iteration_bound(instance, parsed.delta)
            except SasError as e:
                return self._error_response(e)
            return {"status": "success", "bound": bound}
