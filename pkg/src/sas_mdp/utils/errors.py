"""Error classes for SAS-MDP.

This module defines the error hierarchy used throughout the package. Every
error carries a human-readable message, a ``details`` dictionary and a stable
machine-readable ``code`` that the CLI and the MCP tools report verbatim.
"""

from typing import Any, Dict, List, Optional


class SasError(Exception):
    """Base exception for all SAS-MDP errors."""

    code = "SasError"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """Initialize a new SasError.

        Args:
            message: Human-readable error message
            details: Additional details about the error
        """
        self.message = message
        self.details = details or {}
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable error block."""
        return {"error": self.code, "message": self.message, "details": self.details}


class InstanceValidationError(SasError):
    """Raised when an instance violates one or more model invariants.

    All violations are collected before raising; ``issues`` holds one
    ``ValidationIssue`` per violated invariant.
    """

    code = "ValidationError"

    def __init__(self, issues: List[Any]):
        self.issues = list(issues)
        codes = sorted({issue.code for issue in self.issues})
        super().__init__(
            f"Instance failed validation: {', '.join(codes)}",
            {"issues": [issue.model_dump() for issue in self.issues]},
        )

    @property
    def codes(self) -> List[str]:
        """Issue codes in reporting order."""
        return [issue.code for issue in self.issues]

    def to_dict(self) -> Dict[str, Any]:
        block = super().to_dict()
        # Single-cause failures report the cause itself as the error code.
        if len(set(self.codes)) == 1:
            block["error"] = self.codes[0]
        return block


class InstanceFormatError(SasError):
    """Raised when an instance document cannot be parsed."""

    code = "InstanceFormatError"


class UnsupportedModelError(SasError):
    """Raised when an operation does not support the given availability model."""

    code = "UnsupportedModel"


class BadSampleCountError(SasError):
    """Raised when a sample or step count is not positive."""

    code = "BadSampleCount"


class TooLargeError(SasError):
    """Raised when the embedded MDP would be too large to materialize."""

    code = "TooLarge"


class EmptySetError(SasError):
    """Raised when an action must be chosen from an empty available set."""

    code = "EmptySet"


class NotConvergedError(SasError):
    """Raised when an iterative solver hits its iteration cap.

    Attributes:
        result: The partial result at the point the solver stopped
    """

    code = "NotConverged"

    def __init__(self, message: str, result: Any, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.result = result


class SingularSystemError(SasError):
    """Raised when a policy-evaluation system cannot be solved."""

    code = "SingularSystem"


class LpUnboundedError(SasError):
    """Raised when a relaxed LP has no finite optimum."""

    code = "LpUnbounded"


class LpInfeasibleError(SasError):
    """Raised when a relaxed LP has no feasible point."""

    code = "Infeasible"


class SimplexCyclingError(SasError):
    """Raised when the simplex pivot cap is exhausted."""

    code = "Cycling"


class MaxRoundsExceededError(SasError):
    """Raised when constraint generation does not close within its round cap."""

    code = "MaxRoundsExceeded"


class LpStalledError(MaxRoundsExceededError):
    """Raised when the oracle only returns constraints that are already active.

    The relaxed solution still violates them, so further rounds cannot help.
    """

    code = "LpStalled"


class UnavailableActionError(SasError):
    """Raised when an action outside the realized available set is taken."""

    code = "UnavailableAction"


class DisconnectedGraphError(SasError):
    """Raised when a routing graph is not strongly connected."""

    code = "DisconnectedGraph"


class IterationBoundOverflowError(SasError):
    """Raised when the iteration bound exceeds machine range.

    ``details["log_bound"]`` holds the natural-log value of the numerator and
    ``details["log_inverse_gamma"]`` the denominator.
    """

    code = "IterationBoundOverflow"
