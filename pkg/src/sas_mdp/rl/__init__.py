"""Simulation and tabular SAS-Q-learning."""

from sas_mdp.rl.environment import (
    SasEnvironment,
    StepResult,
    TrajectoryRecord,
    TrajectoryRecorder,
    env_step,
)
from sas_mdp.rl.q_learning import (
    EpsilonGreedyExplorer,
    LearningConfig,
    LearningResult,
    RolloutEstimate,
    compressed_value_from_q,
    evaluate_policy_rollout,
    greedy_action,
    sas_q_learning,
)

__all__ = [
    "EpsilonGreedyExplorer",
    "LearningConfig",
    "LearningResult",
    "RolloutEstimate",
    "SasEnvironment",
    "StepResult",
    "TrajectoryRecord",
    "TrajectoryRecorder",
    "compressed_value_from_q",
    "env_step",
    "evaluate_policy_rollout",
    "greedy_action",
    "sas_q_learning",
]
