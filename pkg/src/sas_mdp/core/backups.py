"""Expectations over available sets and decision-list backups.

Everything here reduces to one kernel: for a decision list μ(s), the
probability w_s(k) that μ executes action k. Under PDA the kernel is a
prefix product, for explicit tables it is a sum over listed subsets, and
under sampling it is an empirical frequency. Policy backups, the policy
transition matrix, Bellman backups and LP constraint rows are all
w-weighted sums of Q-values.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from sas_mdp.core.availability import (
    AvailabilityModel,
    ExplicitAvailability,
    PdaAvailability,
    SamplerAvailability,
    masks_to_bits,
)
from sas_mdp.core.mdp import BaseMdp, QFunction, ValueFunction
from sas_mdp.core.policy import DecisionListPolicy, greedy_dl
from sas_mdp.utils.errors import BadSampleCountError, UnsupportedModelError

logger = logging.getLogger(__name__)


def subset_probability(avail: AvailabilityModel, state: int, mask: int) -> float:
    """Probability P_s(A) that exactly the subset ``mask`` is available.

    Raises:
        UnsupportedModelError: For sample-only models
    """
    if isinstance(avail, (PdaAvailability, ExplicitAvailability)):
        return avail.subset_probability(state, mask)
    raise UnsupportedModelError(
        f"subset_probability needs a PDA or explicit model, got {avail.kind}"
    )


def dl_position_weights(
    avail: AvailabilityModel, state: int, order: np.ndarray
) -> np.ndarray:
    """Per-action probability that decision list ``order`` executes it at ``state``.

    Action μ(i) runs when it is available and none of μ(0..i-1) is. Under
    PDA that is a running product of (1 − ρ); explicit tables credit each
    subset's mass to its highest-ranked member. Validated models put zero
    mass on "no listed action available", so the weights sum to one.

    Args:
        avail: PDA or explicit availability model
        state: State whose realized sets are weighed
        order: Permutation of the m actions, highest priority first

    Returns:
        Array of length m indexed by action, not by list position

    Raises:
        UnsupportedModelError: For sample-only models
    """
    order = np.asarray(order, dtype=np.int64)
    weights = np.zeros(len(order))
    if isinstance(avail, PdaAvailability):
        rho = avail.rho[state, order]
        survive = np.concatenate(([1.0], np.cumprod(1.0 - rho)[:-1]))
        weights[order] = survive * rho
        return weights
    if isinstance(avail, ExplicitAvailability):
        ranks = np.empty_like(order)
        ranks[order] = np.arange(len(order))
        for mask, prob in avail.tables[state]:
            members = [k for k in range(len(order)) if mask >> k & 1]
            if members:
                weights[min(members, key=lambda k: ranks[k])] += prob
        return weights
    raise UnsupportedModelError(
        f"Exact DL weights need a PDA or explicit model, got {avail.kind}"
    )


def dl_weight_matrix(avail: AvailabilityModel, policy: DecisionListPolicy) -> np.ndarray:
    """Stack of :func:`dl_position_weights` for every state, shape (n, m)."""
    if isinstance(avail, PdaAvailability):
        rows = np.arange(policy.n_states)[:, None]
        rho = avail.rho[rows, policy.orders]
        survive = np.ones_like(rho)
        survive[:, 1:] = np.cumprod(1.0 - rho, axis=1)[:, :-1]
        weights = np.zeros_like(rho)
        weights[rows, policy.orders] = survive * rho
        return weights
    return np.vstack(
        [dl_position_weights(avail, s, policy.orders[s]) for s in range(policy.n_states)]
    )


def sampled_dl_weights(
    avail: SamplerAvailability,
    policy: DecisionListPolicy,
    n_samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Empirical execution frequencies of a DL from ``n_samples`` draws per state.

    Raises:
        BadSampleCountError: If ``n_samples`` < 1
    """
    if n_samples < 1:
        raise BadSampleCountError(
            f"Sample count must be at least 1, got {n_samples}", {"n_samples": n_samples}
        )
    n, m = policy.n_states, policy.n_actions
    weights = np.zeros((n, m))
    for s in range(n):
        masks = avail.sample_many(s, rng, n_samples)
        bits = masks_to_bits(masks, m)[:, policy.orders[s]]
        executed = policy.orders[s][np.argmax(bits, axis=1)]
        weights[s] = np.bincount(executed, minlength=m) / n_samples
    return weights


def _policy_backup(
    mdp: BaseMdp, weights: np.ndarray, values: ValueFunction
) -> ValueFunction:
    return np.sum(weights * mdp.q_values(values), axis=1)


def dl_backup_pda(
    mdp: BaseMdp,
    avail: PdaAvailability,
    policy: DecisionListPolicy,
    values: ValueFunction,
) -> ValueFunction:
    """Policy backup T^μ_c V under PDA without enumerating subsets.

    T^μ_c V(s) = Σ_i [Π_{j<i} (1 − ρ_{μ(s)(j)})] ρ_{μ(s)(i)} Q^V(s, μ(s)(i)).
    """
    if not isinstance(avail, PdaAvailability):
        raise UnsupportedModelError(f"dl_backup_pda needs a PDA model, got {avail.kind}")
    return _policy_backup(mdp, dl_weight_matrix(avail, policy), values)


def dl_backup_explicit(
    mdp: BaseMdp,
    avail: ExplicitAvailability,
    policy: DecisionListPolicy,
    values: ValueFunction,
) -> ValueFunction:
    """Exact policy backup as a direct expectation over the listed subsets."""
    if not isinstance(avail, ExplicitAvailability):
        raise UnsupportedModelError(
            f"dl_backup_explicit needs an explicit model, got {avail.kind}"
        )
    return _policy_backup(mdp, dl_weight_matrix(avail, policy), values)


def dl_backup_ads(
    mdp: BaseMdp,
    avail: SamplerAvailability,
    policy: DecisionListPolicy,
    values: ValueFunction,
    n_samples: int,
    rng: Optional[np.random.Generator] = None,
) -> ValueFunction:
    """Monte-Carlo policy backup from ``n_samples`` drawn sets per state.

    The estimate is unbiased for the exact backup under the sampler's
    distribution; its standard error shrinks as 1/sqrt(n_samples). Without
    ``rng`` the sampler's master seed is used, so repeated calls return
    identical estimates. Exact models are wrapped in a sampler first.

    Args:
        mdp: Base MDP supplying Q^V
        avail: Sampler to draw available sets from
        policy: Decision list being evaluated
        values: Current value estimate V
        n_samples: Draws per state, at least 1
        rng: Generator to draw with

    Returns:
        The estimated backup, one entry per state

    Raises:
        BadSampleCountError: If ``n_samples`` < 1
    """
    if not isinstance(avail, SamplerAvailability):
        avail = SamplerAvailability.from_model(avail)
    rng = rng if rng is not None else avail.make_rng()
    weights = sampled_dl_weights(avail, policy, n_samples, rng)
    return _policy_backup(mdp, weights, values)


def dl_transition_matrix(
    mdp: BaseMdp, avail: AvailabilityModel, policy: DecisionListPolicy
) -> Tuple[np.ndarray, np.ndarray]:
    """Expected n×n transition matrix P^μ and reward vector r^μ of a DL.

    Raises:
        UnsupportedModelError: For sample-only models
    """
    weights = dl_weight_matrix(avail, policy)
    p_mu = np.einsum("sk,skt->st", weights, mdp.transitions)
    r_mu = np.sum(weights * mdp.rewards, axis=1)
    return p_mu, r_mu


def expected_max_q(
    avail: AvailabilityModel, q_values: QFunction
) -> Tuple[ValueFunction, DecisionListPolicy]:
    """E_A max_{k∈A} Q(s,k) per state, with the greedy DL that attains it."""
    policy = greedy_dl(q_values)
    weights = dl_weight_matrix(avail, policy)
    return np.sum(weights * q_values, axis=1), policy
