"""Base MDP model.

The base MDP holds the finite state and action sets, the transition kernel,
the rewards and the discount factor. Availability randomness lives in
``sas_mdp.core.availability``; the two together form an SAS-MDP instance.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from numpy.typing import NDArray

logger = logging.getLogger(__name__)

# Real vector over states (V) and real matrix over state-action pairs (Q).
ValueFunction = NDArray[np.float64]
QFunction = NDArray[np.float64]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BaseMdp:
    """Finite discounted MDP over a base action set shared by every state.

    Attributes:
        n_states: Number of states n
        n_actions: Number of base actions m
        transitions: Array of shape (n, m, n); ``transitions[s, k]`` is the
            distribution over successor states of action k at state s
        rewards: Array of shape (n, m) with the reward of action k at state s
        discount: Discount factor in [0, 1)
        state_names: Optional display names, one per state
        action_labels: Optional display names per (state, action)
    """

    n_states: int
    n_actions: int
    transitions: np.ndarray
    rewards: np.ndarray
    discount: float
    state_names: Optional[List[str]] = field(default=None)
    action_labels: Optional[List[List[str]]] = field(default=None)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "transitions", _frozen(np.array(self.transitions, dtype=float))
        )
        object.__setattr__(self, "rewards", _frozen(np.array(self.rewards, dtype=float)))
        object.__setattr__(self, "discount", float(self.discount))

    def q_values(self, values: ValueFunction) -> QFunction:
        """One-step lookahead Q(s,k) = r^k_s + γ Σ_{s'} p^k_{s,s'} V(s')."""
        return self.rewards + self.discount * (self.transitions @ values)

    def state_name(self, s: int) -> str:
        """Display name of state ``s``."""
        if self.state_names:
            return self.state_names[s]
        return f"s{s}"

    def action_label(self, s: int, k: int) -> str:
        """Display name of action ``k`` at state ``s``."""
        if self.action_labels:
            return self.action_labels[s][k]
        return str(k)


def max_abs_reward(mdp: BaseMdp) -> float:
    """max_{s,k} |r^k_s|."""
    return float(np.max(np.abs(mdp.rewards))) if mdp.rewards.size else 0.0


def value_bound(mdp: BaseMdp) -> float:
    """Upper bound max|r| / (1 - γ) on any value function of the instance."""
    return max_abs_reward(mdp) / (1.0 - mdp.discount)
