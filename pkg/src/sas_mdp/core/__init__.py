"""Core module for SAS-MDP.

This package holds the domain types (base MDP, availability models,
decision-list policies), instance validation and file I/O, and the
expectation machinery behind every backup.
"""

from sas_mdp.core.availability import (
    AvailabilityModel,
    ExplicitAvailability,
    PdaAvailability,
    SamplerAvailability,
    actions_of,
    full_availability,
    mask_of,
)
from sas_mdp.core.backups import (
    dl_backup_ads,
    dl_backup_explicit,
    dl_backup_pda,
    dl_position_weights,
    dl_transition_matrix,
    dl_weight_matrix,
    expected_max_q,
    subset_probability,
)
from sas_mdp.core.instance_io import (
    load_instance,
    parse_instance,
    save_instance,
    serialize_instance,
)
from sas_mdp.core.instances import random_instance, two_state_instance
from sas_mdp.core.mdp import BaseMdp, QFunction, ValueFunction, value_bound
from sas_mdp.core.policy import DecisionListPolicy, argmax_available, greedy_dl
from sas_mdp.core.validation import ValidatedInstance, ValidationIssue, validate

__all__ = [
    "AvailabilityModel",
    "BaseMdp",
    "DecisionListPolicy",
    "ExplicitAvailability",
    "PdaAvailability",
    "QFunction",
    "SamplerAvailability",
    "ValidatedInstance",
    "ValidationIssue",
    "ValueFunction",
    "actions_of",
    "argmax_available",
    "dl_backup_ads",
    "dl_backup_explicit",
    "dl_backup_pda",
    "dl_position_weights",
    "dl_transition_matrix",
    "dl_weight_matrix",
    "expected_max_q",
    "full_availability",
    "greedy_dl",
    "load_instance",
    "mask_of",
    "parse_instance",
    "random_instance",
    "save_instance",
    "serialize_instance",
    "subset_probability",
    "two_state_instance",
    "validate",
    "value_bound",
]
