"""Decision-list policies.

A decision list (DL) fixes, per state, a total order over the base actions.
Given a realized available set, the policy executes the highest-ranked
available action. Optimal SAS-MDP policies always admit this form.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from sas_mdp.core.availability import available_indices
from sas_mdp.core.mdp import BaseMdp, QFunction
from sas_mdp.utils.errors import EmptySetError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DecisionListPolicy:
    """Per-state permutation of the base actions, highest priority first.

    Attributes:
        orders: Integer array of shape (n, m); row s is the DL μ(s)
    """

    orders: np.ndarray

    def __post_init__(self) -> None:
        orders = np.array(self.orders, dtype=np.int64)
        if orders.ndim != 2:
            raise ValueError("Decision list orders must be a 2-D array")
        expected = np.arange(orders.shape[1])
        for s, row in enumerate(orders):
            if not np.array_equal(np.sort(row), expected):
                raise ValueError(f"Decision list at state {s} is not a permutation: {row}")
        orders.setflags(write=False)
        object.__setattr__(self, "orders", orders)
        ranks = np.empty_like(orders)
        rows = np.arange(orders.shape[0])[:, None]
        ranks[rows, orders] = np.arange(orders.shape[1])
        ranks.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)

    @classmethod
    def identity(cls, n_states: int, n_actions: int) -> "DecisionListPolicy":
        """The DL [0, 1, ..., m-1] at every state."""
        return cls(np.tile(np.arange(n_actions), (n_states, 1)))

    @classmethod
    def from_lists(cls, lists: Sequence[Sequence[int]]) -> "DecisionListPolicy":
        """Build from one action list per state."""
        return cls(np.array(lists, dtype=np.int64))

    @property
    def n_states(self) -> int:
        return int(self.orders.shape[0])

    @property
    def n_actions(self) -> int:
        return int(self.orders.shape[1])

    def first_available(self, state: int, mask: int) -> int:
        """Highest-ranked action of μ(state) contained in ``mask``.

        Raises:
            EmptySetError: If no listed action is in ``mask``
        """
        for k in self.orders[state]:
            if mask >> int(k) & 1:
                return int(k)
        raise EmptySetError(f"No action of the decision list is available at state {state}")

    def as_lists(self) -> List[List[int]]:
        return [[int(k) for k in row] for row in self.orders]

    def labels(self, mdp: BaseMdp) -> List[List[str]]:
        """Decision lists with the instance's action labels."""
        return [[mdp.action_label(s, int(k)) for k in row] for s, row in enumerate(self.orders)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DecisionListPolicy):
            return NotImplemented
        return np.array_equal(self.orders, other.orders)

    def __hash__(self) -> int:
        return hash(self.orders.tobytes())

    def __repr__(self) -> str:
        return f"DecisionListPolicy({self.as_lists()})"


def greedy_dl(q_values: QFunction) -> DecisionListPolicy:
    """Sort actions by Q-value, descending, per state.

    Ties are broken by ascending action index, so the result is a
    deterministic function of ``q_values``.
    """
    q_values = np.asarray(q_values, dtype=float)
    return DecisionListPolicy(np.argsort(-q_values, axis=1, kind="stable"))


def argmax_available(q_row: np.ndarray, mask: int) -> int:
    """Action of largest Q within ``mask``; ties go to the lowest index.

    Raises:
        EmptySetError: If ``mask`` is empty
    """
    if mask <= 0:
        raise EmptySetError("Cannot choose an action from an empty available set")
    indices = available_indices(mask, len(q_row))
    if indices.size == 0:
        raise EmptySetError(f"Available set {mask} names no action of this state")
    return int(indices[np.argmax(q_row[indices])])
