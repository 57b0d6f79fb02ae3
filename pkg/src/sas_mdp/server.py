"""SAS-MDP MCP Server implementation.

This module provides a Model Context Protocol (MCP) server that exposes the
SAS-MDP solvers, the embedded-MDP oracle, SAS-Q-learning and the bundled
experiments as tools.

Example usage:
    server = SasMdpMCPServer()
    server.run(transport="stdio")
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from mcp.server.fastmcp import FastMCP

from sas_mdp import __version__
from sas_mdp.config import LOG_LEVELS, SolverSettings, configure_logging
from sas_mdp.services import SolverService
from sas_mdp.tools import ToolBase, discover_tool_classes

logger = logging.getLogger(__name__)


class SasMdpMCPServer:
    """MCP server for SAS-MDP solving and learning.

    Tool classes are discovered in :mod:`sas_mdp.tools` and share one
    :class:`SolverService` built from the server's settings.
    """

    def __init__(
        self,
        name: str = "SAS-MDP Solver",
        description: str = "Solves and learns MDPs with stochastic action sets",
        version: str = __version__,
        port: int = 8000,
        settings: Optional[SolverSettings] = None,
    ) -> None:
        """Initialize the MCP server.

        Args:
            name: The name of the server
            description: A description of the server's purpose
            version: The server version
            port: The port to listen on for the SSE transport
            settings: Solver defaults; read from the environment when omitted
        """
        self.name = name
        self.description = description
        self.version = version
        self.port = port
        self.settings = settings or SolverSettings.from_env()
        self.service = SolverService(self.settings)
        self.mcp = FastMCP(name, port=port)

        self._tools: Dict[str, ToolBase] = {}
        for class_name, tool_class in discover_tool_classes().items():
            self._tools[class_name] = tool_class(self)
            logger.info(f"Initialized {class_name}")

        self._register_server_resources()
        logger.info(f"Initialized {self.name} MCP server version {self.version}")

    def _register_server_resources(self) -> None:
        """Register server-specific MCP resources."""

        @self.mcp.resource("server://info")
        def get_server_info() -> Dict[str, Any]:
            """Get server information and capabilities."""
            return self.info()

    def info(self) -> Dict[str, Any]:
        """Server metadata and the capabilities of every tool class."""
        capabilities = []
        for tool in self._tools.values():
            capabilities.extend(tool.get_capabilities())
        return {
            "name": self.name,
            "version": self.version,
            "description": self.description,
            "capabilities": capabilities,
            "settings": self.settings.model_dump(),
        }

    def run(self, transport: str = "stdio") -> None:
        """Run the MCP server.

        Args:
            transport: "stdio" or "sse"
        """
        logger.info(f"Starting {self.name} MCP server over {transport}")
        self.mcp.run(transport=transport)


def main() -> None:
    """Entry point of the ``sas-mcp`` command."""
    parser = argparse.ArgumentParser(description="SAS-MDP MCP Server")
    parser.add_argument(
        "--port", type=int, default=8000, help="Port for the SSE transport (default: 8000)"
    )
    parser.add_argument(
        "--transport",
        type=str,
        choices=["stdio", "sse"],
        default="stdio",
        help="Transport protocol to use (default: stdio)",
    )
    parser.add_argument(
        "--log-level",
        type=str,
        choices=LOG_LEVELS,
        default=None,
        help="Logging level (default: SAS_LOG_LEVEL or INFO)",
    )
    parser.add_argument("--env-file", type=Path, default=None, help="Path to a .env file")
    args = parser.parse_args()

    settings = SolverSettings.from_env(args.env_file)
    if args.log_level:
        settings = settings.model_copy(update={"log_level": args.log_level})
    configure_logging(settings.log_level)
    logging.getLogger("mcp.server.sse").setLevel(logging.INFO)

    server = SasMdpMCPServer(port=args.port, settings=settings)
    try:
        server.run(transport=args.transport)
    except KeyboardInterrupt:
        logger.info("Server stopped by user")


if __name__ == "__main__":
    main()
