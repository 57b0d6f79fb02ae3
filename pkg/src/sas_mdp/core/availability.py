"""Action availability models.

At every visit to state s a random nonempty subset A of the base actions is
available. Three models describe that randomness:

- ``PdaAvailability``: each action k is available independently with
  probability ρ^k_s (product distribution).
- ``ExplicitAvailability``: a categorical distribution over subset bitmasks.
- ``SamplerAvailability``: a seeded black box that only supports drawing.

Subsets are encoded as integer bitmasks over action indices.
"""

import functools
import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from sas_mdp.utils.errors import EmptySetError, TooLargeError

logger = logging.getLogger(__name__)

MAX_EXPLICIT_ACTIONS = 62
MAX_ENUMERATED_ACTIONS = 20

SubsetTable = Tuple[Tuple[int, float], ...]


def masks_to_bits(masks: np.ndarray, n_actions: int) -> np.ndarray:
    """Boolean matrix of shape (len(masks), m) with bit k of every mask."""
    masks = np.asarray(masks, dtype=np.int64)
    return (masks[:, None] >> np.arange(n_actions, dtype=np.int64)) & 1 == 1


def bits_to_masks(bits: np.ndarray) -> np.ndarray:
    """Inverse of :func:`masks_to_bits`."""
    weights = np.left_shift(np.int64(1), np.arange(bits.shape[-1], dtype=np.int64))
    return bits.astype(np.int64) @ weights


class AvailabilityModel(ABC):
    """Common interface of the availability models."""

    kind: str = ""

    @property
    @abstractmethod
    def n_states(self) -> int:
        """Number of states covered by the model."""

    @property
    @abstractmethod
    def n_actions(self) -> int:
        """Number of base actions covered by the model."""

    @property
    def is_exact(self) -> bool:
        """Whether subset probabilities can be computed (not sample-only)."""
        return True

    @abstractmethod
    def sample(self, state: int, rng: np.random.Generator) -> int:
        """Draw one available-set bitmask at ``state``."""

    def sample_many(self, state: int, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` available-set bitmasks at ``state``."""
        return np.array([self.sample(state, rng) for _ in range(size)], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class PdaAvailability(AvailabilityModel):
    """Product distribution: action k is available at s with probability ρ^k_s.

    Attributes:
        rho: Array of shape (n, m) of availability probabilities
    """

    rho: np.ndarray
    kind: str = field(default="pda", init=False)
    _weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        rho = np.array(self.rho, dtype=float)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        width = rho.shape[1] if rho.ndim == 2 else 0
        object.__setattr__(
            self, "_weights", np.left_shift(np.int64(1), np.arange(width, dtype=np.int64))
        )

    @property
    def n_states(self) -> int:
        return int(self.rho.shape[0])

    @property
    def n_actions(self) -> int:
        return int(self.rho.shape[1]) if self.rho.ndim == 2 else 0

    def sure_actions(self, state: int) -> List[int]:
        """Actions available with probability one at ``state``."""
        return [int(k) for k in np.flatnonzero(self.rho[state] == 1.0)]

    def sample(self, state: int, rng: np.random.Generator) -> int:
        bits = rng.random(self.n_actions) < self.rho[state]
        mask = int(bits.astype(np.int64) @ self._weights)
        if mask == 0:
            raise EmptySetError(f"Empty available set drawn at state {state}")
        return mask

    def sample_many(self, state: int, rng: np.random.Generator, size: int) -> np.ndarray:
        bits = rng.random((size, self.n_actions)) < self.rho[state]
        masks = bits_to_masks(bits)
        if np.any(masks == 0):
            raise EmptySetError(f"Empty available set drawn at state {state}")
        return masks

    def subset_probability(self, state: int, mask: int) -> float:
        """ρ_s^A = Π_{k∈A} ρ^k_s · Π_{k∉A} (1 − ρ^k_s)."""
        rho = self.rho[state]
        prob = 1.0
        for k in range(self.n_actions):
            prob *= rho[k] if mask >> k & 1 else 1.0 - rho[k]
        return float(prob)

    def subset_distribution(self, state: int) -> SubsetTable:
        """All subsets of positive probability at ``state`` with their mass.

        Only actions with 0 < ρ < 1 branch, so the enumeration is over
        2^(number of uncertain actions) subsets.

        Raises:
            TooLargeError: If more than ``MAX_ENUMERATED_ACTIONS`` actions are uncertain
        """
        rho = self.rho[state]
        sure = mask_of(np.flatnonzero(rho == 1.0))
        uncertain = [int(k) for k in np.flatnonzero((rho > 0.0) & (rho < 1.0))]
        if len(uncertain) > MAX_ENUMERATED_ACTIONS:
            raise TooLargeError(
                f"State {state} has {len(uncertain)} uncertain actions; "
                f"enumeration is capped at {MAX_ENUMERATED_ACTIONS}",
                {"state": state, "uncertain_actions": len(uncertain)},
            )
        table = []
        for flags in itertools.product((False, True), repeat=len(uncertain)):
            mask = sure
            prob = 1.0
            for k, on in zip(uncertain, flags):
                if on:
                    mask |= 1 << k
                    prob *= rho[k]
                else:
                    prob *= 1.0 - rho[k]
            if mask and prob > 0.0:
                table.append((mask, float(prob)))
        table.sort()
        return tuple(table)

    def to_explicit(self) -> "ExplicitAvailability":
        """Expand into an explicit subset table (subsets of positive mass only)."""
        return ExplicitAvailability(
            tables=tuple(self.subset_distribution(s) for s in range(self.n_states)),
            actions=self.n_actions,
        )


@dataclass(frozen=True, eq=False)
class ExplicitAvailability(AvailabilityModel):
    """Categorical distribution over subset bitmasks, listed per state.

    Attributes:
        tables: Per state, a tuple of (bitmask, probability) pairs
        actions: Number of base actions m (at most 62)
    """

    tables: Tuple[SubsetTable, ...]
    actions: int
    kind: str = field(default="explicit", init=False)

    def __post_init__(self) -> None:
        tables = tuple(
            tuple((int(mask), float(prob)) for mask, prob in table) for table in self.tables
        )
        object.__setattr__(self, "tables", tables)
        object.__setattr__(
            self,
            "_cumulative",
            tuple(np.cumsum([prob for _, prob in table]) for table in tables),
        )
        object.__setattr__(
            self,
            "_masks",
            tuple(np.array([mask for mask, _ in table], dtype=np.int64) for table in tables),
        )

    @property
    def n_states(self) -> int:
        return len(self.tables)

    @property
    def n_actions(self) -> int:
        return self.actions

    def subset_probability(self, state: int, mask: int) -> float:
        """Table lookup of P_s(A); 0 when the subset is not listed."""
        return float(sum(prob for m, prob in self.tables[state] if m == mask))

    def subset_distribution(self, state: int) -> SubsetTable:
        """Listed subsets of positive probability at ``state``."""
        return tuple((mask, prob) for mask, prob in self.tables[state] if prob > 0.0)

    def _pick(self, state: int, u: np.ndarray) -> np.ndarray:
        cumulative = self._cumulative[state]
        idx = np.searchsorted(cumulative, u * cumulative[-1], side="right")
        return self._masks[state][np.minimum(idx, len(cumulative) - 1)]

    def sample(self, state: int, rng: np.random.Generator) -> int:
        return int(self._pick(state, np.array([rng.random()]))[0])

    def sample_many(self, state: int, rng: np.random.Generator, size: int) -> np.ndarray:
        return self._pick(state, rng.random(size))


@dataclass(frozen=True, eq=False)
class SamplerAvailability(AvailabilityModel):
    """Black-box availability: subsets can be drawn but not enumerated.

    Attributes:
        states: Number of states
        actions: Number of base actions
        draw: Callable ``(state, rng) -> bitmask``
        seed: Master seed; identical seeds give identical draw sequences
        batch_draw: Optional vectorized ``(state, rng, size) -> bitmasks``
        source: The wrapped model when the sampler was built from one
    """

    states: int
    actions: int
    draw: Callable[[int, np.random.Generator], int]
    seed: int = 0
    batch_draw: Optional[Callable[[int, np.random.Generator, int], np.ndarray]] = None
    source: Optional[AvailabilityModel] = None
    kind: str = field(default="sampler-seed", init=False)

    @classmethod
    def from_model(cls, model: AvailabilityModel, seed: int = 0) -> "SamplerAvailability":
        """Wrap an exact model so that only sampling is visible."""
        return cls(
            states=model.n_states,
            actions=model.n_actions,
            draw=model.sample,
            seed=seed,
            batch_draw=model.sample_many,
            source=model,
        )

    @property
    def n_states(self) -> int:
        return self.states

    @property
    def n_actions(self) -> int:
        return self.actions

    @property
    def is_exact(self) -> bool:
        return False

    def make_rng(self, *stream: int) -> np.random.Generator:
        """Generator seeded from the master seed and an optional stream index."""
        return np.random.default_rng([self.seed, *stream])

    def sample(self, state: int, rng: np.random.Generator) -> int:
        mask = int(self.draw(state, rng))
        if mask == 0:
            raise EmptySetError(f"Sampler produced an empty set at state {state}")
        return mask

    def sample_many(self, state: int, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.batch_draw is None:
            return super().sample_many(state, rng, size)
        masks = np.asarray(self.batch_draw(state, rng, size), dtype=np.int64)
        if np.any(masks == 0):
            raise EmptySetError(f"Sampler produced an empty set at state {state}")
        return masks


def mask_of(actions: Sequence[int]) -> int:
    """Bitmask of the given action indices."""
    mask = 0
    for k in actions:
        mask |= 1 << int(k)
    return mask


def full_availability(n_states: int, n_actions: int) -> PdaAvailability:
    """Every action available with probability one at every state."""
    return PdaAvailability(rho=np.ones((n_states, n_actions)))


def actions_of(mask: int, n_actions: int) -> List[int]:
    """Ascending action indices contained in ``mask``."""
    return [k for k in range(n_actions) if mask >> k & 1]


@functools.lru_cache(maxsize=4096)
def available_indices(mask: int, n_actions: int) -> np.ndarray:
    """Read-only array form of :func:`actions_of`."""
    indices = np.array(actions_of(mask, n_actions), dtype=np.int64)
    indices.setflags(write=False)
    return indices
