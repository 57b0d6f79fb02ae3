"""
Tools package for the SAS-MDP MCP server.

Every module here defines ToolBase subclasses; the server discovers and
instantiates them at start-up.
"""

import importlib
import inspect
import logging
import pkgutil
import sys
from typing import Dict, Type

from sas_mdp.tools.base import ToolBase

logger = logging.getLogger(__name__)

__all__ = [
    "ToolBase",
    "discover_tool_classes",
]


def discover_tool_classes() -> Dict[str, Type[ToolBase]]:
    """Discover all tool classes in the tools package.

    Returns:
        A dictionary mapping tool class names to tool class types
    """
    tool_classes = {}
    package = sys.modules[__name__]
    for _, module_name, _ in pkgutil.iter_modules(package.__path__, package.__name__ + "."):
        if module_name.endswith(".base"):
            continue
        try:
            module = importlib.import_module(module_name)
        except ImportError as e:
            logger.warning(f"Failed to import module {module_name}: {e}")
            continue
        for name, obj in inspect.getmembers(module, inspect.isclass):
            if issubclass(obj, ToolBase) and obj is not ToolBase and obj.__module__ == module_name:
                tool_classes[name] = obj
                logger.debug(f"Discovered tool class: {name}")

    names = ", ".join(tool_classes)
    logger.info(f"Discovered {len(tool_classes)} tool classes: {names}")
    return tool_classes
