"""
Shared environment types and the clipping contract.

Environments only ever act on clip(u, lower, upper): transitions and the
clip-dependent part of every reward see the clipped action.
"""

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from ..policy import ActionBounds


class PenaltyMode(Enum):
    """How the integrator charges for action magnitude"""
    NONE = "none"
    CLIPPED = "clipped"
    PRECLIP = "preclip"


class Weighting(Enum):
    """Per-timestep weighting of return-to-go in a batch"""
    GAMMA_T = "gamma_t"
    FLAT = "flat"


def clip_action(u, bounds: ActionBounds) -> np.ndarray:
    """Elementwise max(min(u, upper), lower)."""
    return np.clip(np.asarray(u, dtype=float), bounds.lower, bounds.upper)


class TrajectoryStep(NamedTuple):
    """One recorded timestep"""
    state: np.ndarray
    pre_clip_action: np.ndarray
    clipped_action: np.ndarray
    reward: float
    discounted_weight: float
    return_to_go: float
    next_return_to_go: float


@dataclass(frozen=True)
class Trajectory:
    """
    One episode, stored column-wise.

    Attributes:
        states: (T, k) states the actions were taken in
        pre_clip_actions: (T, d) actions as sampled
        clipped_actions: (T, d) actions as executed
        rewards: (T,)
        discounted_weights: (T,) gamma^t
        returns_to_go: (T,) r_t + gamma * G_{t+1}, with G_T = 0
        next_returns_to_go: (T,) G_{t+1}
        gamma: discount used for the returns
    """
    states: np.ndarray
    pre_clip_actions: np.ndarray
    clipped_actions: np.ndarray
    rewards: np.ndarray
    discounted_weights: np.ndarray
    returns_to_go: np.ndarray
    next_returns_to_go: np.ndarray
    gamma: float

    def __len__(self) -> int:
        return self.rewards.size

    def __iter__(self):
        for t in range(len(self)):
            yield TrajectoryStep(
                state=self.states[t],
                pre_clip_action=self.pre_clip_actions[t],
                clipped_action=self.clipped_actions[t],
                reward=float(self.rewards[t]),
                discounted_weight=float(self.discounted_weights[t]),
                return_to_go=float(self.returns_to_go[t]),
                next_return_to_go=float(self.next_returns_to_go[t]),
            )

    @property
    def undiscounted_return(self) -> float:
        return float(np.sum(self.rewards))


def returns_to_go(rewards: np.ndarray, gamma: float) -> np.ndarray:
    """Backward recursion G_t = r_t + gamma * G_{t+1}, G_T = 0, along axis 0."""
    rewards = np.asarray(rewards, dtype=float)
    returns = np.zeros_like(rewards)
    running = np.zeros(rewards.shape[1:])
    for t in range(rewards.shape[0] - 1, -1, -1):
        running = rewards[t] + gamma * running
        returns[t] = running
    return returns
