"""Environments package."""

from .bandit import (
    BanditEnv,
    bandit_reward,
    penalty_bandit_reward,
    penalty_bandit_reward_parts,
    penalty_decomposed_batch,
    sample_bandit_batch,
)
from .base import (
    PenaltyMode,
    Trajectory,
    TrajectoryStep,
    Weighting,
    clip_action,
    returns_to_go,
)
from .integrator import (
    IntegratorMdp,
    mdp_step,
    rollout,
    rollouts,
    trajectories_to_batch,
    trajectories_to_decomposed_batch,
    trajectory_to_batch,
)

__all__ = [
    "BanditEnv",
    "bandit_reward",
    "penalty_bandit_reward",
    "penalty_bandit_reward_parts",
    "penalty_decomposed_batch",
    "sample_bandit_batch",
    "PenaltyMode",
    "Trajectory",
    "TrajectoryStep",
    "Weighting",
    "clip_action",
    "returns_to_go",
    "IntegratorMdp",
    "mdp_step",
    "rollout",
    "rollouts",
    "trajectories_to_batch",
    "trajectories_to_decomposed_batch",
    "trajectory_to_batch",
]
