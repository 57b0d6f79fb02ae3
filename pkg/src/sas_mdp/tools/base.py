"""Base module for all SAS-MDP MCP tool classes.

This module provides a base class for tool classes to inherit from,
ensuring consistent initialization, tool registration and error replies.
"""

import logging
from typing import Any, Dict, List, Type, TypeVar

from pydantic import BaseModel, ValidationError

from sas_mdp.core.instance_io import InstanceDocument, document_to_instance
from sas_mdp.core.validation import ValidatedInstance
from sas_mdp.utils.errors import InstanceFormatError, SasError

logger = logging.getLogger(__name__)

RequestT = TypeVar("RequestT", bound=BaseModel)


class ToolBase:
    """Base class for all SAS-MDP MCP tool classes.

    Attributes:
        _server: The SasMdpMCPServer this tool class belongs to
        _service: The server's SolverService
        _mcp: The FastMCP instance tools are registered on
    """

    def __init__(self, server_instance: Any):
        """Initialize the tool class.

        Args:
            server_instance: The SasMdpMCPServer instance that this tool class is associated with
        """
        self._server = server_instance
        self._service = server_instance.service
        self._mcp = server_instance.mcp
        self._register_resources()
        self._register_tools()

    def _register_resources(self) -> None:
        """Register resources specific to this class; override in subclasses."""

    def _register_tools(self) -> None:
        """Register tools specific to this class; override in subclasses."""

    def get_capabilities(self) -> List[str]:
        """Names of the tools this class registers."""
        return []

    @staticmethod
    def _parse_request(model: Type[RequestT], request: Dict[str, Any]) -> RequestT:
        try:
            return model.model_validate(request)
        except ValidationError as e:
            raise InstanceFormatError(
                f"Invalid {model.__name__}",
                {"errors": [{"loc": list(err["loc"]), "msg": err["msg"]} for err in e.errors()]},
            ) from e

    @staticmethod
    def _parse_instance(document: Dict[str, Any]) -> ValidatedInstance:
        try:
            parsed = InstanceDocument.model_validate(document)
        except ValidationError as e:
            raise InstanceFormatError(
                "Instance document is malformed",
                {"errors": [{"loc": list(err["loc"]), "msg": err["msg"]} for err in e.errors()]},
            ) from e
        return document_to_instance(parsed)

    @staticmethod
    def _error_response(error: SasError) -> Dict[str, Any]:
        logger.error(f"Tool request failed with {error.code}: {error.message}")
        body = error.to_dict()
        return {
            "status": "error",
            "code": body["error"],
            "message": error.message,
            "details": body["details"],
        }
