"""The embedded MDP over states s∘A.

Each embedded state pairs a base state with one realized available set of
positive probability. Transitions factor as p^k(s, s') · P_{s'}(A'), so the
embedded kernel is never stored densely: the next-state expectation of any
V_e collapses onto base states first (``expectation``), and only then is
the base kernel applied. ``transition_matrix`` materializes one action's
dense kernel for tests and small inspections.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from sas_mdp.core.availability import (
    AvailabilityModel,
    ExplicitAvailability,
    PdaAvailability,
    masks_to_bits,
)
from sas_mdp.core.mdp import BaseMdp, ValueFunction
from sas_mdp.core.policy import argmax_available
from sas_mdp.utils.errors import TooLargeError, UnsupportedModelError

logger = logging.getLogger(__name__)

MAX_EMBEDDED_ACTIONS = 14


@dataclass(frozen=True, eq=False)
class EmbeddedMdp:
    """Embedded MDP in factorized form.

    Attributes:
        mdp: The base MDP
        base_states: Base state of each embedded state, shape (N,)
        masks: Available set of each embedded state, shape (N,)
        probabilities: P_s(A) of each embedded state, shape (N,)
        feasible: Boolean (N, m) matrix, True where k ∈ A
    """

    mdp: BaseMdp
    base_states: np.ndarray
    masks: np.ndarray
    probabilities: np.ndarray
    feasible: np.ndarray
    _index: Dict[Tuple[int, int], int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        index = {
            (int(s), int(mask)): e
            for e, (s, mask) in enumerate(zip(self.base_states, self.masks))
        }
        object.__setattr__(self, "_index", index)

    @property
    def n_embedded(self) -> int:
        return int(len(self.base_states))

    @property
    def n_actions(self) -> int:
        return self.mdp.n_actions

    @property
    def discount(self) -> float:
        return self.mdp.discount

    @property
    def states(self) -> List[Tuple[int, int]]:
        """Embedded states as (base state, mask) pairs."""
        return [(int(s), int(mask)) for s, mask in zip(self.base_states, self.masks)]

    def index(self, state: int, mask: int) -> int:
        """Position of s∘A; KeyError if the pair has zero probability."""
        return self._index[(state, mask)]

    @property
    def rewards(self) -> np.ndarray:
        """r^k(s∘A) = r^k(s), shape (N, m); infeasible entries included."""
        return self.mdp.rewards[self.base_states]

    def expectation(self, values: np.ndarray) -> ValueFunction:
        """Σ_A P_s(A) V_e(s∘A) for every base state s."""
        return np.bincount(
            self.base_states,
            weights=self.probabilities * values,
            minlength=self.mdp.n_states,
        )

    def q_values(self, values: np.ndarray) -> np.ndarray:
        """Q_e(s∘A, k) for all k; entries with k ∉ A are -inf."""
        q = self.mdp.q_values(self.expectation(values))[self.base_states]
        return np.where(self.feasible, q, -np.inf)

    def transition_matrix(self, action: int) -> np.ndarray:
        """Dense (N, N) kernel of ``action``; rows of infeasible pairs included."""
        p_base = self.mdp.transitions[self.base_states, action]
        return p_base[:, self.base_states] * self.probabilities[None, :]


def _subset_tables(avail: AvailabilityModel) -> List[List[Tuple[int, float]]]:
    if isinstance(avail, PdaAvailability):
        if avail.n_actions > MAX_EMBEDDED_ACTIONS:
            raise TooLargeError(
                f"Embedded construction supports at most {MAX_EMBEDDED_ACTIONS} "
                f"actions, got {avail.n_actions}",
                {"n_actions": avail.n_actions, "limit": MAX_EMBEDDED_ACTIONS},
            )
        return [list(avail.subset_distribution(s)) for s in range(avail.n_states)]
    if isinstance(avail, ExplicitAvailability):
        return [list(table) for table in avail.tables]
    raise UnsupportedModelError(
        f"Embedded construction needs a PDA or explicit model, got {avail.kind}"
    )


def build_embedded(mdp: BaseMdp, avail: AvailabilityModel) -> EmbeddedMdp:
    """Materialize the embedded states of positive probability.

    Args:
        mdp: The base MDP
        avail: PDA or explicit availability

    Returns:
        The embedded MDP

    Raises:
        TooLargeError: If a PDA model has more than 14 actions
        UnsupportedModelError: For sample-only models
    """
    base_states, masks, probabilities = [], [], []
    for s, table in enumerate(_subset_tables(avail)):
        merged: Dict[int, float] = {}
        for mask, prob in table:
            if prob > 0.0:
                merged[int(mask)] = merged.get(int(mask), 0.0) + float(prob)
        for mask in sorted(merged):
            base_states.append(s)
            masks.append(mask)
            probabilities.append(merged[mask])
    masks_arr = np.array(masks, dtype=np.int64)
    emb = EmbeddedMdp(
        mdp=mdp,
        base_states=np.array(base_states, dtype=np.int64),
        masks=masks_arr,
        probabilities=np.array(probabilities),
        feasible=masks_to_bits(masks_arr, mdp.n_actions),
    )
    logger.debug(
        f"Built embedded MDP with {emb.n_embedded} states from {mdp.n_states} base states"
    )
    return emb


def embedded_bellman(emb: EmbeddedMdp, values: np.ndarray) -> np.ndarray:
    """T*_e V_e(s∘A) = max_{k∈A} Q_e(s∘A, k)."""
    return np.max(emb.q_values(values), axis=1)


@dataclass(frozen=True)
class EmbeddedSolution:
    """Result of value iteration on the embedded MDP.

    ``policy`` holds one action per embedded state, always inside its set.
    """

    values: np.ndarray
    policy: np.ndarray
    iterations: int


def solve_embedded_vi(
    emb: EmbeddedMdp, eps: float = 1e-8, max_iters: int = 100_000
) -> EmbeddedSolution:
    """Standard value iteration on the embedded MDP.

    Stops once ||V_{t+1} − V_t||_∞ ≤ eps(1−γ)/(2γ); the greedy policy of the
    final iterate is then eps-optimal.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    gamma = emb.discount
    threshold = eps * (1.0 - gamma) / (2.0 * gamma) if gamma > 0 else np.inf
    values = np.zeros(emb.n_embedded)
    iterations = 0
    while iterations < max_iters:
        updated = embedded_bellman(emb, values)
        iterations += 1
        residual = float(np.max(np.abs(updated - values)))
        values = updated
        if residual <= threshold:
            break
    else:
        logger.warning(f"Embedded VI stopped at max_iters={max_iters}")
    q = emb.q_values(values)
    # argmax over -inf padding returns the lowest feasible index on ties
    policy = np.argmax(q, axis=1)
    logger.debug(f"Embedded VI finished after {iterations} iterations")
    return EmbeddedSolution(values=values, policy=policy, iterations=iterations)


def compress_value(emb: EmbeddedMdp, values: np.ndarray) -> ValueFunction:
    """The E-operator: V_c(s) = Σ_A P_s(A) V_e(s∘A)."""
    return emb.expectation(np.asarray(values, dtype=float))


def extract_embedded_policy(
    mdp: BaseMdp, avail: AvailabilityModel, values: ValueFunction
) -> Callable[[int, int], int]:
    """Greedy embedded policy built from a compressed value function.

    The returned callable maps (s, A) to argmax_{k∈A} Q^{V_c}(s, k), ties by
    ascending index, and raises EmptySetError when A is empty. ``avail`` is
    not consulted; the one-step lookahead only needs the base model.
    """
    q = mdp.q_values(np.asarray(values, dtype=float))

    def policy(state: int, mask: int) -> int:
        return argmax_available(q[state], mask)

    return policy
