"""Compressed-space exact solvers: value iteration and policy iteration."""

from sas_mdp.solve.policy_iteration import (
    PolicyIterationResult,
    policy_evaluation,
    policy_iteration,
)
from sas_mdp.solve.value_iteration import (
    ValueIterationResult,
    bellman_backup,
    value_iteration,
    vi_iteration_bound,
    vi_iteration_bound_log,
)

__all__ = [
    "PolicyIterationResult",
    "ValueIterationResult",
    "bellman_backup",
    "policy_evaluation",
    "policy_iteration",
    "value_iteration",
    "vi_iteration_bound",
    "vi_iteration_bound_log",
]
