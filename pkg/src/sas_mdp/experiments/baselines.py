"""Availability-oblivious baseline policy."""

import logging

import numpy as np

from sas_mdp.core.availability import (
    AvailabilityModel,
    ExplicitAvailability,
    PdaAvailability,
    SamplerAvailability,
    masks_to_bits,
)
from sas_mdp.core.mdp import BaseMdp
from sas_mdp.core.policy import DecisionListPolicy, greedy_dl
from sas_mdp.solve.value_iteration import value_iteration
from sas_mdp.utils.errors import UnsupportedModelError

logger = logging.getLogger(__name__)


def possible_actions(avail: AvailabilityModel) -> np.ndarray:
    """Boolean (n, m) matrix of actions with positive availability."""
    if isinstance(avail, SamplerAvailability) and avail.source is not None:
        avail = avail.source
    if isinstance(avail, PdaAvailability):
        return avail.rho > 0.0
    if isinstance(avail, ExplicitAvailability):
        possible = np.zeros((avail.n_states, avail.n_actions), dtype=bool)
        for s, table in enumerate(avail.tables):
            masks = np.array([mask for mask, prob in table if prob > 0.0], dtype=np.int64)
            possible[s] = masks_to_bits(masks, avail.n_actions).any(axis=0)
        return possible
    raise UnsupportedModelError(
        f"Cannot tell which actions exist under {avail.kind} availability"
    )


def oblivious_policy(
    mdp: BaseMdp,
    avail: AvailabilityModel,
    eps: float = 1e-9,
    max_iters: int = 200_000,
) -> DecisionListPolicy:
    """DL that ranks actions by the Q-values of the fully-available problem.

    Every action that can ever appear is assumed always available; the
    problem is solved and actions are sorted by its optimal Q. At run time
    the DL then takes the best available action by that ranking.
    """
    full = PdaAvailability(rho=possible_actions(avail).astype(float))
    result = value_iteration(mdp, full, eps=eps, max_iters=max_iters)
    logger.debug(f"Oblivious baseline solved in {result.iterations} iterations")
    return greedy_dl(mdp.q_values(result.values))
