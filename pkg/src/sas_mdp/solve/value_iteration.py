"""Value iteration in the compressed space.

Each backup computes Q from the current values, sorts actions into the
greedy decision list, and takes the expectation of the best available
Q-value under the availability model. Exact models use the closed-form DL
weights; with ``n_samples`` the expectation is estimated from drawn sets
(the ADS variant), reseeded per iteration from the master seed.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from sas_mdp.core.availability import (
    AvailabilityModel,
    PdaAvailability,
    SamplerAvailability,
)
from sas_mdp.core.backups import dl_weight_matrix, sampled_dl_weights
from sas_mdp.core.mdp import BaseMdp, QFunction, ValueFunction
from sas_mdp.core.policy import DecisionListPolicy, greedy_dl
from sas_mdp.utils.errors import (
    IterationBoundOverflowError,
    NotConvergedError,
    UnsupportedModelError,
)

logger = logging.getLogger(__name__)


@dataclass
class ValueIterationResult:
    """Outcome of :func:`value_iteration`.

    Attributes:
        values: Final value estimate V
        policy: Greedy decision list with respect to ``values``
        iterations: Number of Bellman backups performed
        residuals: ||V_{t+1} − V_t||_∞ after each backup
        policy_stable_at: Backup count t from which the greedy DL of V_t
            no longer changes
        converged: Whether the stopping rule was met
    """

    values: ValueFunction
    policy: DecisionListPolicy
    iterations: int
    residuals: List[float] = field(default_factory=list)
    policy_stable_at: int = 0
    converged: bool = True


def stopping_threshold(eps: float, gamma: float) -> float:
    """Residual below which the greedy policy is eps-optimal."""
    if gamma == 0:
        return math.inf
    return eps * (1.0 - gamma) / (2.0 * gamma)


def _as_sampler(avail: AvailabilityModel) -> SamplerAvailability:
    if isinstance(avail, SamplerAvailability):
        return avail
    return SamplerAvailability.from_model(avail)


def bellman_backup(
    mdp: BaseMdp,
    avail: AvailabilityModel,
    values: ValueFunction,
    n_samples: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[ValueFunction, QFunction, DecisionListPolicy]:
    """One application of the compressed Bellman operator T*_c.

    Args:
        mdp: The base MDP
        avail: Availability model
        values: Current value function
        n_samples: Draw this many sets per state instead of taking the exact
            expectation; required for sample-only models
        rng: Generator for the draws; the sampler's master seed by default

    Returns:
        Tuple of (backed-up values, Q-values of ``values``, greedy DL)

    Raises:
        UnsupportedModelError: If a sample-only model comes without ``n_samples``
        BadSampleCountError: If ``n_samples`` < 1
    """
    q_values = mdp.q_values(np.asarray(values, dtype=float))
    policy = greedy_dl(q_values)
    if n_samples is None:
        if not avail.is_exact:
            raise UnsupportedModelError(
                "Exact Bellman backups need a PDA or explicit model; "
                "pass n_samples for sampled availability",
                {"kind": avail.kind},
            )
        weights = dl_weight_matrix(avail, policy)
    else:
        sampler = _as_sampler(avail)
        rng = rng if rng is not None else sampler.make_rng()
        weights = sampled_dl_weights(sampler, policy, n_samples, rng)
    return np.sum(weights * q_values, axis=1), q_values, policy


def value_iteration(
    mdp: BaseMdp,
    avail: AvailabilityModel,
    eps: float = 1e-8,
    max_iters: int = 10_000,
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
    initial: Optional[ValueFunction] = None,
) -> ValueIterationResult:
    """Iterate T*_c from ``initial`` (zero by default) until the residual
    drops below eps(1−γ)/(2γ).

    Args:
        mdp: The base MDP
        avail: Availability model
        eps: Target precision of the returned policy's value
        max_iters: Backup cap
        n_samples: Sets drawn per state and backup in the ADS variant
        seed: Master seed for ADS draws; the sampler's own seed by default
        initial: Starting value function

    Returns:
        The converged result

    Raises:
        ValueError: If eps is not positive
        NotConvergedError: At ``max_iters``; ``result`` holds the partial result
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    threshold = stopping_threshold(eps, mdp.discount)
    sampler = _as_sampler(avail) if n_samples is not None else None
    master = seed if seed is not None else (sampler.seed if sampler else 0)

    values = np.zeros(mdp.n_states) if initial is None else np.array(initial, dtype=float)
    residuals: List[float] = []
    policies: List[DecisionListPolicy] = []
    converged = False
    for t in range(max_iters):
        rng = np.random.default_rng([master, t]) if sampler is not None else None
        updated, _, policy = bellman_backup(
            mdp, sampler or avail, values, n_samples=n_samples, rng=rng
        )
        residual = float(np.max(np.abs(updated - values)))
        residuals.append(residual)
        policies.append(policy)
        values = updated
        logger.debug(f"VI iteration {t + 1} residual {residual:.3e}")
        if residual <= threshold:
            converged = True
            break

    final_policy = greedy_dl(mdp.q_values(values))
    # greedy DL of V_t is policies[t]; the final one belongs to V_L
    stable_at = len(policies)
    while stable_at > 0 and policies[stable_at - 1] == final_policy:
        stable_at -= 1
    result = ValueIterationResult(
        values=values,
        policy=final_policy,
        iterations=len(residuals),
        residuals=residuals,
        policy_stable_at=stable_at,
        converged=converged,
    )
    if not converged:
        logger.warning(
            f"Value iteration hit max_iters={max_iters} with residual {residuals[-1]:.3e}"
        )
        raise NotConvergedError(
            f"Value iteration did not converge within {max_iters} iterations",
            result,
            {"iterations": max_iters, "residual": residuals[-1], "threshold": threshold},
        )
    logger.info(f"Value iteration converged after {result.iterations} iterations")
    return result


def vi_iteration_bound_log(mdp: BaseMdp, delta: int) -> Tuple[float, float]:
    """Numerator and denominator of the iteration bound in natural logs.

    The numerator is log(2 δ^{2n(m+1)} n^n nm), the denominator log(1/γ).
    """
    n, m = mdp.n_states, mdp.n_actions
    numerator = (
        math.log(2.0)
        + 2 * n * (m + 1) * math.log(delta)
        + n * math.log(n)
        + math.log(n * m)
    )
    denominator = -math.log(mdp.discount) if mdp.discount > 0 else math.inf
    return numerator, denominator


def vi_iteration_bound(mdp: BaseMdp, avail: AvailabilityModel, delta: int) -> int:
    """Iterations after which VI's greedy DL is guaranteed optimal.

    Valid when every number in the instance is rational with denominator
    ``delta``. A diagnostic only; no solver runs this long.

    Raises:
        UnsupportedModelError: If ``avail`` is not a PDA model
        IterationBoundOverflowError: If the bound exceeds machine range;
            the log-space values are in ``details``
    """
    if not isinstance(avail, PdaAvailability):
        raise UnsupportedModelError(
            f"The iteration bound is stated for PDA models, got {avail.kind}"
        )
    if delta < 1:
        raise ValueError(f"delta must be a positive integer, got {delta}")
    numerator, denominator = vi_iteration_bound_log(mdp, delta)
    if math.isinf(denominator):
        return 1
    bound = numerator / denominator
    if not math.isfinite(bound) or bound >= 2.0 ** 62:
        raise IterationBoundOverflowError(
            "Iteration bound exceeds machine range",
            {"log_bound": numerator, "log_inverse_gamma": denominator},
        )
    return max(1, math.ceil(bound))
