"""Tabular SAS-Q-learning.

The update bootstraps from the best action of the set realized at the
successor, max_{k'∈A'} Q(s', k'), and exploration only ever proposes
actions of the current realized set.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from sas_mdp.core.availability import AvailabilityModel, available_indices
from sas_mdp.core.backups import expected_max_q
from sas_mdp.core.mdp import QFunction, ValueFunction
from sas_mdp.core.policy import DecisionListPolicy, argmax_available
from sas_mdp.rl.environment import SasEnvironment, TrajectoryRecord, TrajectoryRecorder
from sas_mdp.utils.errors import BadSampleCountError

logger = logging.getLogger(__name__)

RETURN_WINDOW = 100


class LearningConfig(BaseModel):
    """Schedules and budget for :func:`sas_q_learning`.

    The learning rate of the n-th visit to (s, k) is
    ``lr_scale / (1 + n) ** lr_exponent``; ε falls linearly from
    ``epsilon_start`` to ``epsilon_end`` over the first ``decay_fraction``
    of the episodes and stays there.
    """

    episodes: int = Field(2000, ge=1, description="Number of episodes")
    horizon: int = Field(100, ge=1, description="Steps per episode")
    lr_scale: float = Field(1.0, gt=0, le=1, description="Learning-rate numerator c")
    lr_exponent: float = Field(0.6, description="Learning-rate decay exponent ω")
    epsilon_start: float = Field(1.0, ge=0, le=1, description="Initial exploration rate")
    epsilon_end: float = Field(0.05, ge=0, le=1, description="Final exploration rate")
    decay_fraction: float = Field(0.5, gt=0, le=1, description="Share of episodes spent decaying ε")
    initial_q: float = Field(0.0, description="Initial Q-value of every pair")
    seed: int = Field(0, ge=0, description="Master seed")

    @field_validator("lr_exponent")
    @classmethod
    def validate_lr_exponent(cls, v: float) -> float:
        """Σα = ∞ and Σα² < ∞ need ω in (0.5, 1]."""
        if not 0.5 < v <= 1.0:
            raise ValueError("lr_exponent must lie in (0.5, 1]")
        return v

    @model_validator(mode="after")
    def validate_epsilon_order(self) -> "LearningConfig":
        if self.epsilon_end > self.epsilon_start:
            raise ValueError("epsilon_end must not exceed epsilon_start")
        return self

    @classmethod
    def from_steps(cls, steps: int, horizon: int = 100, **kwargs: object) -> "LearningConfig":
        """Config covering at least ``steps`` environment steps.

        Raises:
            BadSampleCountError: If ``steps`` < 1
        """
        if steps < 1:
            raise BadSampleCountError(
                f"Step budget must be at least 1, got {steps}", {"steps": steps}
            )
        return cls(episodes=math.ceil(steps / horizon), horizon=horizon, **kwargs)

    @property
    def total_steps(self) -> int:
        return self.episodes * self.horizon

    def epsilon(self, episode: int) -> float:
        """Exploration rate of ``episode`` (0-based)."""
        decay_episodes = max(1, int(self.decay_fraction * self.episodes))
        progress = min(1.0, episode / decay_episodes)
        return self.epsilon_start + progress * (self.epsilon_end - self.epsilon_start)

    def learning_rate(self, visits: int) -> float:
        """Step size for the ``visits``-th update of a pair, visits ≥ 1."""
        return self.lr_scale / (1.0 + visits) ** self.lr_exponent


class EpsilonGreedyExplorer:
    """ε-greedy choice within a realized available set."""

    def __init__(self, rng: np.random.Generator, n_actions: int):
        self.rng = rng
        self.n_actions = n_actions

    def choose(self, q_row: np.ndarray, available: int, epsilon: float) -> int:
        if self.rng.random() < epsilon:
            indices = available_indices(available, self.n_actions)
            return int(indices[self.rng.integers(len(indices))])
        return argmax_available(q_row, available)


@dataclass
class LearningResult:
    """Learned Q-table with per-episode diagnostics."""

    q_values: QFunction
    returns: List[float] = field(default_factory=list)
    epsilons: List[float] = field(default_factory=list)
    visits: Optional[np.ndarray] = None

    def mean_returns(self, window: int = RETURN_WINDOW) -> List[float]:
        """Trailing mean of episode returns over up to ``window`` episodes."""
        cumulative = np.concatenate(([0.0], np.cumsum(self.returns)))
        means = []
        for i in range(1, len(self.returns) + 1):
            lo = max(0, i - window)
            means.append(float((cumulative[i] - cumulative[lo]) / (i - lo)))
        return means


def greedy_action(q_values: QFunction, state: int, available: int) -> int:
    """Best action of ``state`` within ``available``; ties by index.

    Raises:
        EmptySetError: If ``available`` is empty
    """
    return argmax_available(np.asarray(q_values)[state], available)


def sas_q_learning(
    env: SasEnvironment,
    config: LearningConfig,
    recorder: Optional[TrajectoryRecorder] = None,
) -> LearningResult:
    """Learn Q from simulated trajectories.

    Every episode restarts ``env`` from the seed (config.seed, episode) and
    runs ``config.horizon`` steps. The update is

        Q(s,k) ← (1 − α) Q(s,k) + α [r + γ max_{k'∈A'} Q(s', k')].

    Args:
        env: Environment to learn from
        config: Schedules and budget
        recorder: Optional sink for every transition

    Returns:
        The learned Q-table, episode returns and exploration rates
    """
    mdp = env.mdp
    gamma = mdp.discount
    q = np.full((mdp.n_states, mdp.n_actions), config.initial_q, dtype=float)
    visits = np.zeros((mdp.n_states, mdp.n_actions), dtype=np.int64)
    explorer = EpsilonGreedyExplorer(
        np.random.default_rng([config.seed, 1 << 20]), mdp.n_actions
    )
    result = LearningResult(q_values=q, visits=visits)

    for episode in range(config.episodes):
        epsilon = config.epsilon(episode)
        state, available, _ = env.reset(seed=[config.seed, episode])
        episode_return, discount = 0.0, 1.0
        for t in range(config.horizon):
            action = explorer.choose(q[state], available, epsilon)
            next_state, next_available, reward = env.step(action)
            target = reward + gamma * q[next_state, argmax_available(q[next_state], next_available)]
            visits[state, action] += 1
            alpha = config.learning_rate(int(visits[state, action]))
            q[state, action] = (1.0 - alpha) * q[state, action] + alpha * target
            if recorder is not None:
                recorder.record(
                    TrajectoryRecord(
                        episode=episode,
                        t=t,
                        s=state,
                        available=available,
                        k=action,
                        r=reward,
                        next_state=next_state,
                    )
                )
            episode_return += discount * reward
            discount *= gamma
            state, available = next_state, next_available
        result.returns.append(episode_return)
        result.epsilons.append(epsilon)
        if (episode + 1) % max(1, config.episodes // 10) == 0:
            logger.debug(
                f"Episode {episode + 1}/{config.episodes}: "
                f"return {episode_return:.4f}, epsilon {epsilon:.3f}"
            )
    logger.info(f"SAS-Q-learning finished {config.total_steps} steps")
    return result


@dataclass(frozen=True)
class RolloutEstimate:
    """Monte-Carlo value estimate with a 95% half-width."""

    mean: float
    ci: float
    episodes: int


def evaluate_policy_rollout(
    env: SasEnvironment,
    policy: DecisionListPolicy,
    episodes: int,
    horizon: int,
    seed: int = 0,
) -> RolloutEstimate:
    """Mean discounted return of a DL over seeded episodes.

    Episode i is seeded with (seed, i); the half-width is 1.96 standard errors.
    """
    if episodes < 1:
        raise BadSampleCountError(
            f"Rollout needs at least one episode, got {episodes}", {"episodes": episodes}
        )
    gamma = env.mdp.discount
    returns = np.empty(episodes)
    for i in range(episodes):
        state, available, _ = env.reset(seed=[seed, i])
        total, discount = 0.0, 1.0
        for _ in range(horizon):
            state, available, reward = env.step(policy.first_available(state, available))
            total += discount * reward
            discount *= gamma
        returns[i] = total
    stderr = float(returns.std(ddof=1) / math.sqrt(episodes)) if episodes > 1 else 0.0
    return RolloutEstimate(mean=float(returns.mean()), ci=1.96 * stderr, episodes=episodes)


def compressed_value_from_q(
    q_values: QFunction, avail: AvailabilityModel
) -> Optional[ValueFunction]:
    """V_c(s) = E_A max_{k∈A} Q(s, k).

    Q alone does not determine V_c; without an exact availability model the
    result is unavailable and None is returned.
    """
    if not avail.is_exact:
        logger.info(f"Compressed values unavailable for {avail.kind} availability")
        return None
    values, _ = expected_max_q(avail, np.asarray(q_values, dtype=float))
    return values
