"""Trajectory simulator for SAS-MDPs.

At every step the environment reveals the state together with the set of
actions available there. Three generator streams are derived from the
episode seed: one for the start state, one for transitions and one for
availability draws. Actions chosen by the caller never touch them, so a
fixed seed and a fixed action sequence give a fixed trajectory.
"""

import logging
from pathlib import Path
from typing import IO, NamedTuple, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field

from sas_mdp.core.availability import AvailabilityModel, actions_of
from sas_mdp.core.mdp import BaseMdp
from sas_mdp.core.validation import ValidatedInstance
from sas_mdp.utils.errors import UnavailableActionError

logger = logging.getLogger(__name__)

Seed = Union[int, Sequence[int]]


class StepResult(NamedTuple):
    """Outcome of one environment step."""

    state: int
    available: int
    reward: float


class SasEnvironment:
    """Seeded SAS-MDP simulator.

    Attributes:
        mdp: The base MDP
        availability: The availability model sampled at every visited state
        start_state: Fixed start state; uniform when None
        seed: Master seed used by :meth:`reset` when none is given
        state: Current state
        available: Realized available set at the current state
        steps: Steps taken since the last reset
    """

    def __init__(
        self,
        mdp: BaseMdp,
        availability: AvailabilityModel,
        seed: Seed = 0,
        start_state: Optional[int] = 0,
    ):
        self.mdp = mdp
        self.availability = availability
        self.start_state = start_state
        self.seed = seed
        self.state = 0
        self.available = 0
        self.steps = 0
        self._cumulative = np.cumsum(mdp.transitions, axis=2)
        self.reset()

    @classmethod
    def from_instance(
        cls, instance: ValidatedInstance, seed: Seed = 0, start_state: Optional[int] = 0
    ) -> "SasEnvironment":
        return cls(instance.mdp, instance.availability, seed=seed, start_state=start_state)

    def reset(self, seed: Optional[Seed] = None) -> StepResult:
        """Start a new trajectory.

        Returns:
            The start state and its realized available set, with reward 0
        """
        seed = self.seed if seed is None else seed
        root = list(seed) if isinstance(seed, (list, tuple)) else [int(seed)]
        start_rng = np.random.default_rng(root + [0])
        self._transition_rng = np.random.default_rng(root + [1])
        self._availability_rng = np.random.default_rng(root + [2])
        if self.start_state is None:
            self.state = int(start_rng.integers(self.mdp.n_states))
        else:
            self.state = self.start_state
        self.available = self.availability.sample(self.state, self._availability_rng)
        self.steps = 0
        return StepResult(self.state, self.available, 0.0)

    def step(self, action: int) -> StepResult:
        """Execute ``action`` from the current state.

        The successor is drawn from the transition stream by inverting the
        cumulative row P(· | s, k); the successor's available set comes
        from the availability stream.

        Args:
            action: Base action index, which must be in :attr:`available`

        Returns:
            The successor state, its realized available set and the reward
            R(s, k) of the step just taken

        Raises:
            UnavailableActionError: If ``action`` is not in the realized set
        """
        if not (0 <= action < self.mdp.n_actions and self.available >> action & 1):
            raise UnavailableActionError(
                f"Action {action} is not available at state {self.state}",
                {
                    "state": self.state,
                    "action": action,
                    "available": actions_of(self.available, self.mdp.n_actions),
                },
            )
        reward = float(self.mdp.rewards[self.state, action])
        cumulative = self._cumulative[self.state, action]
        u = self._transition_rng.random()
        next_state = int(cumulative.searchsorted(u, side="right"))
        next_state = min(next_state, self.mdp.n_states - 1)
        self.state = next_state
        self.available = self.availability.sample(next_state, self._availability_rng)
        self.steps += 1
        return StepResult(self.state, self.available, reward)


def env_step(env: SasEnvironment, action: int) -> StepResult:
    """Step ``env`` with ``action``; see :meth:`SasEnvironment.step`."""
    return env.step(action)


class TrajectoryRecord(BaseModel):
    """One logged transition."""

    episode: int = Field(..., description="Episode index")
    t: int = Field(..., description="Step within the episode")
    s: int = Field(..., description="State before the step")
    available: int = Field(..., description="Realized available set at s, as a bitmask")
    k: int = Field(..., description="Action taken")
    r: float = Field(..., description="Reward received")
    next_state: int = Field(..., description="State after the step")


class TrajectoryRecorder:
    """Writes :class:`TrajectoryRecord` lines to a file, one JSON object per line."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._handle: Optional[IO[str]] = None
        self.count = 0

    def __enter__(self) -> "TrajectoryRecorder":
        self._handle = self.path.open("w")
        return self

    def __exit__(self, *exc_info: object) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None
        logger.info(f"Wrote {self.count} trajectory records to {self.path}")

    def record(self, record: TrajectoryRecord) -> None:
        if self._handle is None:
            raise RuntimeError("TrajectoryRecorder must be used as a context manager")
        self._handle.write(record.model_dump_json() + "\n")
        self.count += 1
