"""Linear programming by constraint generation.

The compressed primal LP is

    min Σ_s α_s v_s   s.t.   v_s ≥ Q^v_s(σ)   for every state s and DL σ,

one constraint per permutation σ of the actions. Q^v_s(σ) is affine in v
with the DL execution weights as coefficients, and the most violated σ at
any v is simply the Q-sorted order, so the loop below only ever adds
constraints the greedy oracle returns.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from sas_mdp.core.availability import AvailabilityModel
from sas_mdp.core.backups import dl_position_weights
from sas_mdp.core.mdp import BaseMdp, ValueFunction
from sas_mdp.core.policy import DecisionListPolicy
from sas_mdp.lp.simplex import simplex_solve
from sas_mdp.utils.errors import (
    LpStalledError,
    MaxRoundsExceededError,
    UnsupportedModelError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DlConstraint:
    """The row v_s ≥ Q^v_s(σ), stored as coefficients · v ≥ bound.

    Attributes:
        state: State s
        sigma: Permutation σ of the actions
        coefficients: e_s − γ Σ_k w_k p^k_{s,·}
        bound: Σ_k w_k r^k_s
    """

    state: int
    sigma: Tuple[int, ...]
    coefficients: np.ndarray
    bound: float

    @classmethod
    def build(
        cls, mdp: BaseMdp, avail: AvailabilityModel, state: int, sigma: np.ndarray
    ) -> "DlConstraint":
        weights = dl_position_weights(avail, state, sigma)
        coefficients = -mdp.discount * (weights @ mdp.transitions[state])
        coefficients[state] += 1.0
        return cls(
            state=state,
            sigma=tuple(int(k) for k in sigma),
            coefficients=coefficients,
            bound=float(weights @ mdp.rewards[state]),
        )

    def q_value(self, values: ValueFunction) -> float:
        """Q^v_s(σ) at ``values``."""
        return self.bound + float(values[self.state] - self.coefficients @ values)

    def violation(self, values: ValueFunction) -> float:
        """Q^v_s(σ) − v_s; positive when the constraint is violated."""
        return self.bound - float(self.coefficients @ values)


@dataclass
class LpState:
    """Objective weights, the active constraint set and the last relaxed solution."""

    alpha: np.ndarray
    constraints: List[DlConstraint] = field(default_factory=list)
    solution: Optional[ValueFunction] = None
    _keys: Set[Tuple[int, Tuple[int, ...]]] = field(default_factory=set, repr=False)

    def __post_init__(self) -> None:
        self.alpha = np.asarray(self.alpha, dtype=float)
        if np.any(self.alpha <= 0.0) or not np.all(np.isfinite(self.alpha)):
            raise ValueError("State weights alpha must all be positive and finite")

    def add(self, constraint: DlConstraint) -> bool:
        """Add a constraint unless the same (s, σ) is already active."""
        key = (constraint.state, constraint.sigma)
        if key in self._keys:
            return False
        self._keys.add(key)
        self.constraints.append(constraint)
        return True

    def solve_relaxation(self) -> float:
        a = np.vstack([con.coefficients for con in self.constraints])
        b = np.array([con.bound for con in self.constraints])
        result = simplex_solve(a, b, self.alpha)
        self.solution = result.x
        return result.objective


def separation_oracle(
    mdp: BaseMdp, avail: AvailabilityModel, values: ValueFunction, state: int
) -> Tuple[np.ndarray, float]:
    """Most violated DL constraint at ``state``.

    Sorting actions by Q^v(s, ·) descending, ties by index, maximizes
    Q^v_s(σ) over all m! permutations.

    Returns:
        Tuple of (σ, Q^v_s(σ) − v_s)
    """
    q_row = mdp.q_values(np.asarray(values, dtype=float))[state]
    sigma = np.argsort(-q_row, kind="stable")
    weights = dl_position_weights(avail, state, sigma)
    return sigma, float(weights @ q_row - values[state])


@dataclass
class LpResult:
    """Outcome of :func:`solve_lp`.

    Attributes:
        values: Optimal compressed values
        policy: Oracle permutation at every state, the optimal DL
        n_constraints: Size of the final active set
        rounds: Relaxations solved
        objective_trace: Relaxed objective after every round
    """

    values: ValueFunction
    policy: DecisionListPolicy
    n_constraints: int
    rounds: int
    objective_trace: List[float] = field(default_factory=list)


def solve_lp(
    mdp: BaseMdp,
    avail: AvailabilityModel,
    alpha: Optional[np.ndarray] = None,
    tol: float = 1e-8,
    max_rounds: Optional[int] = None,
) -> LpResult:
    """Solve the compressed LP by constraint generation.

    Each round solves the relaxation over the active set, queries the
    oracle at every state, and adds every constraint violated by more than
    ``tol``. The active set starts with the identity DL at each state.

    Args:
        mdp: The base MDP
        avail: PDA or explicit availability
        alpha: Positive state weights; uniform 1/n by default
        tol: Violation tolerance
        max_rounds: Round cap; 10·n·m by default

    Returns:
        The LP solution

    Raises:
        UnsupportedModelError: For sample-only models
        MaxRoundsExceededError: If violated constraints remain after ``max_rounds``
        LpStalledError: If a round finds violations but every cut is already active
        LpUnboundedError: If a relaxation is unbounded
    """
    if not avail.is_exact:
        raise UnsupportedModelError(
            f"The LP solver needs a PDA or explicit model, got {avail.kind}"
        )
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    n, m = mdp.n_states, mdp.n_actions
    max_rounds = max_rounds if max_rounds is not None else 10 * n * m
    state = LpState(alpha=alpha if alpha is not None else np.full(n, 1.0 / n))
    identity = np.arange(m)
    for s in range(n):
        state.add(DlConstraint.build(mdp, avail, s, identity))

    trace: List[float] = []
    for round_index in range(1, max_rounds + 1):
        trace.append(state.solve_relaxation())
        values = state.solution
        sigmas = []
        added = 0
        violations: Dict[int, float] = {}
        for s in range(n):
            sigma, violation = separation_oracle(mdp, avail, values, s)
            sigmas.append(sigma)
            if violation > tol:
                violations[s] = violation
                added += state.add(DlConstraint.build(mdp, avail, s, sigma))
        logger.debug(
            f"LP round {round_index}: objective {trace[-1]:.10g}, "
            f"{len(violations)} violated, {added} added"
        )
        if violations and not added:
            logger.warning(
                f"LP round {round_index} re-generated only active constraints"
            )
            raise LpStalledError(
                f"Constraint generation stalled in round {round_index}: the relaxed "
                "solution violates constraints that are already active",
                {
                    "round": round_index,
                    "constraints": len(state.constraints),
                    "violations": {str(s): v for s, v in violations.items()},
                },
            )
        if not added:
            logger.info(
                f"LP converged after {round_index} rounds "
                f"with {len(state.constraints)} constraints"
            )
            return LpResult(
                values=values,
                policy=DecisionListPolicy(np.array(sigmas)),
                n_constraints=len(state.constraints),
                rounds=round_index,
                objective_trace=trace,
            )
    raise MaxRoundsExceededError(
        f"Constraint generation still adding cuts after {max_rounds} rounds",
        {"rounds": max_rounds, "constraints": len(state.constraints)},
    )
