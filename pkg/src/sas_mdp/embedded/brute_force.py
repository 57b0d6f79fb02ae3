"""Exhaustive policy enumeration on tiny instances.

Both enumerators evaluate every deterministic policy of their class exactly
and keep the per-state maximum. They exist to cross-check the solvers and
to confirm that decision lists lose nothing against arbitrary embedded
policies.
"""

import itertools
import logging
import math
from typing import Tuple

import numpy as np

from sas_mdp.core.availability import AvailabilityModel
from sas_mdp.core.backups import dl_transition_matrix
from sas_mdp.core.mdp import BaseMdp, ValueFunction
from sas_mdp.core.policy import DecisionListPolicy
from sas_mdp.embedded.embedded_mdp import EmbeddedMdp, compress_value
from sas_mdp.utils.errors import TooLargeError

logger = logging.getLogger(__name__)

MAX_ENUMERATED_POLICIES = 200_000


def _evaluate(p: np.ndarray, r: np.ndarray, gamma: float) -> np.ndarray:
    return np.linalg.solve(np.eye(len(r)) - gamma * p, r)


def _check_count(count: int, what: str) -> None:
    if count > MAX_ENUMERATED_POLICIES:
        raise TooLargeError(
            f"Enumerating {count} {what} policies exceeds the limit of "
            f"{MAX_ENUMERATED_POLICIES}",
            {"policies": count, "limit": MAX_ENUMERATED_POLICIES},
        )


def enumerate_dl_optimum(
    mdp: BaseMdp, avail: AvailabilityModel
) -> Tuple[ValueFunction, DecisionListPolicy]:
    """Best value over all (m!)^n decision-list policies.

    Returns:
        The per-state maximum value and a DL of largest total value

    Raises:
        TooLargeError: If there are more than 200,000 DL policies
    """
    n, m = mdp.n_states, mdp.n_actions
    _check_count(math.factorial(m) ** n, "decision-list")
    permutations = list(itertools.permutations(range(m)))
    best = np.full(n, -np.inf)
    best_policy, best_total = None, -np.inf
    for orders in itertools.product(permutations, repeat=n):
        policy = DecisionListPolicy.from_lists(orders)
        p_mu, r_mu = dl_transition_matrix(mdp, avail, policy)
        values = _evaluate(p_mu, r_mu, mdp.discount)
        best = np.maximum(best, values)
        if values.sum() > best_total:
            best_policy, best_total = policy, float(values.sum())
    return best, best_policy


def enumerate_embedded_optimum(emb: EmbeddedMdp) -> ValueFunction:
    """Compressed value of the best deterministic embedded policy.

    Every policy picks one feasible action per embedded state.

    Raises:
        TooLargeError: If there are more than 200,000 embedded policies
    """
    choices = [np.flatnonzero(row) for row in emb.feasible]
    _check_count(math.prod(len(c) for c in choices), "embedded")
    rows = np.arange(emb.n_embedded)
    kernel = emb.mdp.transitions[emb.base_states][:, :, emb.base_states]
    kernel = kernel * emb.probabilities[None, None, :]
    rewards = emb.rewards
    best = np.full(emb.n_embedded, -np.inf)
    for actions in itertools.product(*choices):
        actions = np.asarray(actions)
        values = _evaluate(kernel[rows, actions], rewards[rows, actions], emb.discount)
        best = np.maximum(best, values)
    return compress_value(emb, best)
