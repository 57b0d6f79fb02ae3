"""Instance file format.

An instance is a single JSON document::

    {
      "n_states": 2,
      "n_actions": 2,
      "discount": 0.9,
      "rewards": [[0.5, 0.5], [1.0, 0.0]],
      "transitions": [[[1, 0], [0, 1]], [[1, 0], [1, 0]]],
      "availability": {"kind": "pda", "rho": [[1, 1], [0.2, 1]]},
      "state_names": ["s1", "s2"],
      "action_labels": [["Stay", "Go"], ["Up", "Down"]]
    }

``availability.kind`` is one of ``pda`` (``rho``: n x m), ``explicit``
(``subsets``: per state a list of ``{"mask": int, "probability": float}``) or
``sampler-seed`` (``seed``: int, ``source``: a pda or explicit payload that
is only ever sampled). See docs/instance_format.md for the full description.
"""

import logging
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from sas_mdp.core.availability import (
    AvailabilityModel,
    ExplicitAvailability,
    PdaAvailability,
    SamplerAvailability,
)
from sas_mdp.core.mdp import BaseMdp
from sas_mdp.core.validation import ValidatedInstance, validate
from sas_mdp.utils.errors import InstanceFormatError, UnsupportedModelError

logger = logging.getLogger(__name__)


class PdaPayload(BaseModel):
    """Per-action availability probabilities."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["pda"] = "pda"
    rho: List[List[float]] = Field(..., description="ρ^k_s, one row per state")


class SubsetEntry(BaseModel):
    """One listed subset and its probability."""

    model_config = ConfigDict(extra="forbid")

    mask: int = Field(..., ge=0, description="Bitmask over action indices")
    probability: float = Field(..., description="P_s(A)")


class ExplicitPayload(BaseModel):
    """Categorical distribution over subsets, per state."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["explicit"] = "explicit"
    subsets: List[List[SubsetEntry]] = Field(..., description="Subset table per state")


class SamplerPayload(BaseModel):
    """Seeded black-box sampler over a hidden exact model."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["sampler-seed"] = "sampler-seed"
    seed: int = Field(..., ge=0, description="Master seed of the draw sequence")
    source: Annotated[Union[PdaPayload, ExplicitPayload], Field(discriminator="kind")]


AvailabilityPayload = Annotated[
    Union[PdaPayload, ExplicitPayload, SamplerPayload], Field(discriminator="kind")
]


class InstanceDocument(BaseModel):
    """Serialized SAS-MDP instance."""

    model_config = ConfigDict(extra="forbid")

    n_states: int = Field(..., description="Number of states n")
    n_actions: int = Field(..., description="Number of base actions m")
    discount: float = Field(..., description="Discount factor γ")
    rewards: List[List[float]] = Field(..., description="n x m rewards")
    transitions: List[List[List[float]]] = Field(..., description="n x m x n kernel")
    availability: AvailabilityPayload
    state_names: Optional[List[str]] = Field(None, description="Display names of states")
    action_labels: Optional[List[List[str]]] = Field(
        None, description="Display names per (state, action)"
    )


def _array(values: list, name: str) -> np.ndarray:
    try:
        return np.array(values, dtype=float)
    except ValueError as e:
        raise InstanceFormatError(f"Field '{name}' is not a rectangular array", {"field": name}) from e


def _availability_from_payload(payload: Union[PdaPayload, ExplicitPayload, SamplerPayload], n_actions: int) -> AvailabilityModel:
    if isinstance(payload, PdaPayload):
        return PdaAvailability(rho=_array(payload.rho, "availability.rho"))
    if isinstance(payload, ExplicitPayload):
        tables = tuple(
            tuple((entry.mask, entry.probability) for entry in row) for row in payload.subsets
        )
        return ExplicitAvailability(tables=tables, actions=n_actions)
    source = _availability_from_payload(payload.source, n_actions)
    return SamplerAvailability.from_model(source, seed=payload.seed)


def _payload_from_availability(avail: AvailabilityModel) -> Union[PdaPayload, ExplicitPayload, SamplerPayload]:
    if isinstance(avail, PdaAvailability):
        return PdaPayload(rho=avail.rho.tolist())
    if isinstance(avail, ExplicitAvailability):
        return ExplicitPayload(
            subsets=[
                [SubsetEntry(mask=mask, probability=prob) for mask, prob in table]
                for table in avail.tables
            ]
        )
    if isinstance(avail, SamplerAvailability) and avail.source is not None:
        return SamplerPayload(seed=avail.seed, source=_payload_from_availability(avail.source))
    raise UnsupportedModelError("Only samplers wrapping a PDA or explicit model can be serialized")


def document_to_instance(document: InstanceDocument) -> ValidatedInstance:
    """Convert a parsed document into a validated instance."""
    mdp = BaseMdp(
        n_states=document.n_states,
        n_actions=document.n_actions,
        transitions=_array(document.transitions, "transitions"),
        rewards=_array(document.rewards, "rewards"),
        discount=document.discount,
        state_names=document.state_names,
        action_labels=document.action_labels,
    )
    avail = _availability_from_payload(document.availability, document.n_actions)
    return validate(mdp, avail)


def instance_to_document(mdp: BaseMdp, avail: AvailabilityModel) -> InstanceDocument:
    """Convert an instance into its document model."""
    return InstanceDocument(
        n_states=mdp.n_states,
        n_actions=mdp.n_actions,
        discount=mdp.discount,
        rewards=mdp.rewards.tolist(),
        transitions=mdp.transitions.tolist(),
        availability=_payload_from_availability(avail),
        state_names=mdp.state_names,
        action_labels=mdp.action_labels,
    )


def parse_instance(text: str) -> ValidatedInstance:
    """Parse and validate an instance document.

    Raises:
        InstanceFormatError: If the text is not a well-formed document
        InstanceValidationError: If the instance violates model invariants
    """
    try:
        document = InstanceDocument.model_validate_json(text)
    except ValidationError as e:
        raise InstanceFormatError(
            "Instance document is malformed",
            {"errors": [{"loc": list(err["loc"]), "msg": err["msg"]} for err in e.errors()]},
        ) from e
    return document_to_instance(document)


def serialize_instance(mdp: BaseMdp, avail: AvailabilityModel) -> str:
    """Serialize an instance to its JSON document."""
    return instance_to_document(mdp, avail).model_dump_json(indent=2, exclude_none=True)


def load_instance(path: Union[str, Path]) -> ValidatedInstance:
    """Read, parse and validate an instance file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InstanceFormatError(f"Cannot read instance file {path}: {e}", {"path": str(path)}) from e
    logger.info(f"Loading instance from {path}")
    return parse_instance(text)


def save_instance(path: Union[str, Path], mdp: BaseMdp, avail: AvailabilityModel) -> None:
    """Write an instance file."""
    Path(path).write_text(serialize_instance(mdp, avail))
