"""Bundled and generated instances.

``two_state_instance`` is the running example: at s1, Stay (self-loop) and Go
(to s2) both pay 1/2 and are always available; at s2, Up pays 1 but is
available only with probability p, Down pays 0 and is always available, and
both return to s1. For p < 1/2 staying forever beats cycling through s2.
"""

import logging
from importlib import resources
from typing import List, Optional

import numpy as np

from sas_mdp.core.availability import ExplicitAvailability, PdaAvailability
from sas_mdp.core.mdp import BaseMdp
from sas_mdp.core.validation import ValidatedInstance, validate

logger = logging.getLogger(__name__)

S1, S2 = 0, 1
STAY, GO = 0, 1
UP, DOWN = 0, 1


def two_state_instance(p: float = 0.2, gamma: float = 0.9) -> ValidatedInstance:
    """The two-state Stay/Go, Up/Down example with Up available w.p. ``p``."""
    transitions = np.zeros((2, 2, 2))
    transitions[S1, STAY, S1] = 1.0
    transitions[S1, GO, S2] = 1.0
    transitions[S2, UP, S1] = 1.0
    transitions[S2, DOWN, S1] = 1.0
    rewards = np.array([[0.5, 0.5], [1.0, 0.0]])
    mdp = BaseMdp(
        n_states=2,
        n_actions=2,
        transitions=transitions,
        rewards=rewards,
        discount=gamma,
        state_names=["s1", "s2"],
        action_labels=[["Stay", "Go"], ["Up", "Down"]],
    )
    rho = np.array([[1.0, 1.0], [p, 1.0]])
    return validate(mdp, PdaAvailability(rho=rho))


def random_instance(
    rng: np.random.Generator,
    n_states: int,
    n_actions: int,
    kind: str = "pda",
    gamma: float = 0.9,
    reward_low: float = -1.0,
    reward_high: float = 1.0,
    support: Optional[int] = None,
) -> ValidatedInstance:
    """Random dense instance.

    Transition rows are Dirichlet draws. Under PDA one random action per
    state is made sure (ρ = 1) and the rest are uniform in (0, 1). Explicit
    tables list ``support`` random nonempty subsets (default: up to four)
    with Dirichlet masses.

    Args:
        rng: Source of randomness
        n_states: Number of states
        n_actions: Number of actions
        kind: "pda" or "explicit"
        gamma: Discount factor
        reward_low: Lower reward bound
        reward_high: Upper reward bound
        support: Number of listed subsets per state for explicit tables

    Returns:
        A validated instance
    """
    transitions = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
    # Dirichlet rows can miss 1 by an ulp; renormalize onto the simplex.
    transitions /= transitions.sum(axis=2, keepdims=True)
    rewards = rng.uniform(reward_low, reward_high, size=(n_states, n_actions))
    mdp = BaseMdp(
        n_states=n_states,
        n_actions=n_actions,
        transitions=transitions,
        rewards=rewards,
        discount=gamma,
    )
    if kind == "pda":
        rho = rng.uniform(0.05, 0.95, size=(n_states, n_actions))
        rho[np.arange(n_states), rng.integers(n_actions, size=n_states)] = 1.0
        avail = PdaAvailability(rho=rho)
    elif kind == "explicit":
        n_subsets = 2 ** n_actions - 1
        size = min(support or 4, n_subsets)
        tables = []
        for _ in range(n_states):
            masks = rng.choice(np.arange(1, n_subsets + 1), size=size, replace=False)
            probs = rng.dirichlet(np.ones(size))
            probs[-1] = 1.0 - probs[:-1].sum()
            tables.append(tuple(zip(masks.tolist(), probs.tolist())))
        avail = ExplicitAvailability(tables=tuple(tables), actions=n_actions)
    else:
        raise ValueError(f"Unknown availability kind: {kind}")
    return validate(mdp, avail)


def bundled_instance_names() -> List[str]:
    """Names of the instance files shipped in ``sas_mdp/data``."""
    files = resources.files("sas_mdp").joinpath("data").iterdir()
    return sorted(f.name[: -len(".json")] for f in files if f.name.endswith(".json"))


def load_bundled_instance(name: str) -> ValidatedInstance:
    """Load and validate a shipped instance file by name."""
    from sas_mdp.core.instance_io import parse_instance

    text = resources.files("sas_mdp").joinpath("data").joinpath(f"{name}.json").read_text()
    return parse_instance(text)

