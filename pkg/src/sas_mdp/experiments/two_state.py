"""Value lost by ignoring availability on the two-state example.

The naive policy ranks actions by the Q-values of the problem with every
action always available (Go before Stay at s1). The SAS-optimal policy
stays at s1 whenever Up is available at s2 with probability below 1/2.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

from sas_mdp.core.instances import S1, two_state_instance
from sas_mdp.experiments.baselines import oblivious_policy
from sas_mdp.solve.policy_iteration import policy_evaluation
from sas_mdp.solve.value_iteration import value_iteration

logger = logging.getLogger(__name__)

DEFAULT_P_GRID = tuple(float(p) for p in np.round(np.linspace(0.05, 1.0, 20), 2))


@dataclass(frozen=True)
class CurvePoint:
    """Values at s1 for one availability probability p."""

    p: float
    v_sas: float
    v_naive: float
    fraction_lost: float


def curve_point(p: float, gamma: float = 0.9, eps: float = 1e-10) -> CurvePoint:
    """SAS-optimal and naive values at s1 for availability ``p`` of Up."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    instance = two_state_instance(p=p, gamma=gamma)
    mdp, avail = instance.mdp, instance.availability
    optimal = value_iteration(mdp, avail, eps=eps)
    v_sas = float(policy_evaluation(mdp, avail, optimal.policy)[S1])
    v_naive = float(policy_evaluation(mdp, avail, oblivious_policy(mdp, avail))[S1])
    fraction_lost = max(0.0, 1.0 - v_naive / v_sas) if v_sas != 0.0 else 0.0
    return CurvePoint(p=p, v_sas=v_sas, v_naive=v_naive, fraction_lost=fraction_lost)


def two_state_curve(
    p_grid: Iterable[float] = DEFAULT_P_GRID, gamma: float = 0.9, eps: float = 1e-10
) -> List[CurvePoint]:
    """:func:`curve_point` over ``p_grid``."""
    points = [curve_point(float(p), gamma=gamma, eps=eps) for p in p_grid]
    logger.info(f"Computed two-state curve over {len(points)} values of p")
    return points
