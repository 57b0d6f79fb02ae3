"""Instance validation.

``validate`` checks every invariant of the base MDP and the availability
model, collects all violations, and either returns a ``ValidatedInstance``
or raises ``InstanceValidationError`` listing each of them.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from sas_mdp.core.availability import (
    MAX_EXPLICIT_ACTIONS,
    AvailabilityModel,
    ExplicitAvailability,
    PdaAvailability,
    SamplerAvailability,
)
from sas_mdp.core.mdp import BaseMdp
from sas_mdp.utils.errors import InstanceValidationError

logger = logging.getLogger(__name__)

ROW_TOLERANCE = 1e-12


class ValidationIssue(BaseModel):
    """One violated invariant."""

    code: str = Field(..., description="Issue code, e.g. 'NonStochasticRow'")
    message: str = Field(..., description="Human-readable description")
    location: Optional[str] = Field(None, description="Where the violation was found")


@dataclass(frozen=True, eq=False)
class ValidatedInstance:
    """A base MDP and availability model that passed :func:`validate`."""

    mdp: BaseMdp
    availability: AvailabilityModel

    @property
    def n_states(self) -> int:
        return self.mdp.n_states

    @property
    def n_actions(self) -> int:
        return self.mdp.n_actions


def _check_dimensions(mdp: BaseMdp, avail: AvailabilityModel) -> List[ValidationIssue]:
    issues = []
    n, m = mdp.n_states, mdp.n_actions
    if n < 1 or m < 1:
        issues.append(
            ValidationIssue(
                code="DimensionMismatch",
                message=f"n_states and n_actions must be positive, got {n} and {m}",
            )
        )
        return issues
    if mdp.transitions.shape != (n, m, n):
        issues.append(
            ValidationIssue(
                code="DimensionMismatch",
                message=f"transitions has shape {mdp.transitions.shape}, expected {(n, m, n)}",
                location="transitions",
            )
        )
    if mdp.rewards.shape != (n, m):
        issues.append(
            ValidationIssue(
                code="DimensionMismatch",
                message=f"rewards has shape {mdp.rewards.shape}, expected {(n, m)}",
                location="rewards",
            )
        )
    if avail.n_states != n or avail.n_actions != m:
        issues.append(
            ValidationIssue(
                code="DimensionMismatch",
                message=(
                    f"availability covers {avail.n_states} states x {avail.n_actions} "
                    f"actions, expected {n} x {m}"
                ),
                location="availability",
            )
        )
    if isinstance(avail, PdaAvailability) and avail.rho.ndim != 2:
        issues.append(
            ValidationIssue(
                code="DimensionMismatch",
                message="PDA probabilities must be an n x m matrix",
                location="availability.rho",
            )
        )
    return issues


def _check_mdp(mdp: BaseMdp) -> List[ValidationIssue]:
    issues = []
    for s in range(mdp.n_states):
        for k in range(mdp.n_actions):
            row = mdp.transitions[s, k]
            if not np.all(np.isfinite(row)) or np.any(row < 0.0) or abs(row.sum() - 1.0) > ROW_TOLERANCE:
                issues.append(
                    ValidationIssue(
                        code="NonStochasticRow",
                        message=f"transition row sums to {row.sum()!r} with minimum {row.min()!r}",
                        location=f"transitions[{s}][{k}]",
                    )
                )
    bad = np.argwhere(~np.isfinite(mdp.rewards))
    for s, k in bad:
        issues.append(
            ValidationIssue(
                code="NonFiniteReward",
                message=f"reward {mdp.rewards[s, k]!r} is not finite",
                location=f"rewards[{s}][{k}]",
            )
        )
    if not (np.isfinite(mdp.discount) and 0.0 <= mdp.discount < 1.0):
        issues.append(
            ValidationIssue(
                code="BadDiscount",
                message=f"discount must lie in [0, 1), got {mdp.discount!r}",
                location="discount",
            )
        )
    return issues


def _check_pda(avail: PdaAvailability, prefix: str = "availability") -> List[ValidationIssue]:
    issues = []
    rho = avail.rho
    for s in range(avail.n_states):
        row = rho[s]
        if not np.all(np.isfinite(row)) or np.any(row < 0.0) or np.any(row > 1.0):
            issues.append(
                ValidationIssue(
                    code="BadProbability",
                    message=f"availability probabilities must lie in [0, 1], got {row.tolist()}",
                    location=f"{prefix}.rho[{s}]",
                )
            )
        if not np.any(row == 1.0):
            issues.append(
                ValidationIssue(
                    code="EmptySubsetPossible",
                    message=(
                        "no action is available with probability 1, so the empty set "
                        f"has mass {float(np.prod(1.0 - row))!r}"
                    ),
                    location=f"{prefix}.rho[{s}]",
                )
            )
    return issues


def _check_explicit(
    avail: ExplicitAvailability, prefix: str = "availability"
) -> List[ValidationIssue]:
    issues = []
    m = avail.n_actions
    if m > MAX_EXPLICIT_ACTIONS:
        issues.append(
            ValidationIssue(
                code="DimensionMismatch",
                message=f"explicit tables support at most {MAX_EXPLICIT_ACTIONS} actions, got {m}",
                location=prefix,
            )
        )
    for s, table in enumerate(avail.tables):
        if not table:
            issues.append(
                ValidationIssue(
                    code="BadProbability",
                    message="subset table is empty",
                    location=f"{prefix}.subsets[{s}]",
                )
            )
            continue
        total = 0.0
        for i, (mask, prob) in enumerate(table):
            where = f"{prefix}.subsets[{s}][{i}]"
            if mask == 0:
                issues.append(
                    ValidationIssue(
                        code="EmptySubsetPossible",
                        message="the empty subset is listed",
                        location=where,
                    )
                )
            elif mask < 0 or mask >> m:
                issues.append(
                    ValidationIssue(
                        code="DimensionMismatch",
                        message=f"mask {mask} names actions outside 0..{m - 1}",
                        location=where,
                    )
                )
            if not np.isfinite(prob) or prob < 0.0:
                issues.append(
                    ValidationIssue(
                        code="BadProbability",
                        message=f"subset probability {prob!r} is negative or not finite",
                        location=where,
                    )
                )
            total += prob
        if abs(total - 1.0) > ROW_TOLERANCE:
            issues.append(
                ValidationIssue(
                    code="BadProbability",
                    message=f"subset probabilities sum to {total!r}",
                    location=f"{prefix}.subsets[{s}]",
                )
            )
    return issues


def collect_issues(mdp: BaseMdp, avail: AvailabilityModel) -> List[ValidationIssue]:
    """Every violated invariant of ``(mdp, avail)``; empty when valid."""
    issues = _check_dimensions(mdp, avail)
    if issues:
        # Element checks index by the declared sizes.
        return issues
    issues.extend(_check_mdp(mdp))
    issues.extend(_check_availability(avail, "availability"))
    return issues


def _check_availability(avail: AvailabilityModel, prefix: str) -> List[ValidationIssue]:
    if isinstance(avail, PdaAvailability):
        return _check_pda(avail, prefix)
    if isinstance(avail, ExplicitAvailability):
        return _check_explicit(avail, prefix)
    if not isinstance(avail, SamplerAvailability) or avail.source is None:
        # Opaque samplers are only checked when they draw.
        return []
    source = avail.source
    where = f"{prefix}.source"
    if source.n_states != avail.n_states or source.n_actions != avail.n_actions:
        return [
            ValidationIssue(
                code="DimensionMismatch",
                message=(
                    f"sampler source covers {source.n_states} states x {source.n_actions} "
                    f"actions, expected {avail.n_states} x {avail.n_actions}"
                ),
                location=where,
            )
        ]
    return _check_availability(source, where)


def validate(mdp: BaseMdp, avail: AvailabilityModel) -> ValidatedInstance:
    """Validate an SAS-MDP instance.

    Args:
        mdp: The base MDP
        avail: The availability model

    Returns:
        The validated instance

    Raises:
        InstanceValidationError: Listing every violated invariant
    """
    issues = collect_issues(mdp, avail)
    if issues:
        logger.info(f"Instance rejected with {len(issues)} issue(s)")
        raise InstanceValidationError(issues)
    logger.debug(
        f"Validated {avail.kind} instance with "
        f"{mdp.n_states} states and {mdp.n_actions} actions"
    )
    return ValidatedInstance(mdp=mdp, availability=avail)
