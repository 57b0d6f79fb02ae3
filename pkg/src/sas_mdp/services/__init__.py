"""Services shared by the command line and the MCP server."""

from sas_mdp.services.solver_service import SolverService

__all__ = ["SolverService"]
