"""Policy iteration over decision lists."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from sas_mdp.core.availability import AvailabilityModel
from sas_mdp.core.backups import dl_transition_matrix
from sas_mdp.core.mdp import BaseMdp, ValueFunction
from sas_mdp.core.policy import DecisionListPolicy, greedy_dl
from sas_mdp.utils.errors import NotConvergedError, SingularSystemError

logger = logging.getLogger(__name__)

EVALUATION_RESIDUAL = 1e-9


@dataclass
class PolicyIterationResult:
    """Outcome of :func:`policy_iteration`.

    ``iterations`` counts policy evaluations; ``value_trace`` holds the value
    of every evaluated policy in order.
    """

    values: ValueFunction
    policy: DecisionListPolicy
    iterations: int
    value_trace: List[ValueFunction] = field(default_factory=list)


def policy_evaluation(
    mdp: BaseMdp, avail: AvailabilityModel, policy: DecisionListPolicy
) -> ValueFunction:
    """Exact value of a decision list: solve (I − γP^μ)V = r^μ.

    Raises:
        UnsupportedModelError: For sample-only models
        SingularSystemError: If the linear system cannot be solved
    """
    p_mu, r_mu = dl_transition_matrix(mdp, avail, policy)
    system = np.eye(mdp.n_states) - mdp.discount * p_mu
    try:
        values = np.linalg.solve(system, r_mu)
    except np.linalg.LinAlgError as e:
        raise SingularSystemError(
            f"Policy evaluation system is singular: {e}",
            {"n_states": mdp.n_states, "discount": mdp.discount},
        ) from e
    residual = float(np.max(np.abs(system @ values - r_mu)))
    if not np.isfinite(residual):
        raise SingularSystemError(
            "Policy evaluation produced non-finite values", {"residual": residual}
        )
    if residual > EVALUATION_RESIDUAL:
        logger.warning(
            f"Policy evaluation residual {residual:.3e} above {EVALUATION_RESIDUAL:.0e}"
        )
    return values


def policy_iteration(
    mdp: BaseMdp,
    avail: AvailabilityModel,
    initial: Optional[DecisionListPolicy] = None,
    max_iters: int = 1000,
) -> PolicyIterationResult:
    """Alternate exact evaluation and greedy DL improvement.

    Stops when the improved DL equals the evaluated one. Without
    ``initial`` the search starts from the reward-sorted DL, i.e. the
    greedy DL of Q at V = 0.

    Raises:
        NotConvergedError: If the DL keeps changing after ``max_iters`` evaluations
    """
    policy = initial if initial is not None else greedy_dl(mdp.q_values(np.zeros(mdp.n_states)))
    trace: List[ValueFunction] = []
    for _ in range(max_iters):
        values = policy_evaluation(mdp, avail, policy)
        trace.append(values)
        improved = greedy_dl(mdp.q_values(values))
        logger.debug(f"PI evaluation {len(trace)}: policy {improved}")
        if improved == policy:
            logger.info(f"Policy iteration converged after {len(trace)} evaluations")
            return PolicyIterationResult(
                values=values, policy=policy, iterations=len(trace), value_trace=trace
            )
        policy = improved
    result = PolicyIterationResult(
        values=trace[-1], policy=policy, iterations=len(trace), value_trace=trace
    )
    raise NotConvergedError(
        f"Policy iteration did not settle within {max_iters} evaluations",
        result,
        {"iterations": max_iters},
    )
