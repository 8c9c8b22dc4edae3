"""
Continuum-armed bandits.

The standard bandit pays r(u) = -(1/d) sum_i |clip(u_i)|, maximal (zero)
only at the origin. The penalty variant adds -c (1/d) sum_i u_i^2 on the
raw action, which breaks the clip-only dependence of the reward.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..estimators import BaselineMode, Batch, DecomposedBatch, apply_baseline
from ..policy import ActionBounds, GaussianPolicyParams, PolicyError, sample_action
from .base import clip_action

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BanditEnv:
    """Stateless bandit over [lower, upper]^d (default [-1, 1]^d)"""
    d: int = 1
    bounds: Optional[ActionBounds] = field(default=None)

    def __post_init__(self):
        if self.d < 1:
            raise PolicyError(f"Bandit needs d >= 1, got {self.d}")
        if self.bounds is None:
            object.__setattr__(self, "bounds", ActionBounds.symmetric(self.d))
        elif self.bounds.dim != self.d:
            raise PolicyError(f"Bounds have {self.bounds.dim} dimensions, bandit has {self.d}")

    @staticmethod
    def states(n: int) -> np.ndarray:
        """Featureless states for n draws."""
        return np.zeros((n, 0))


def bandit_reward(env: BanditEnv, u) -> np.ndarray:
    """-(1/d) sum_i |clip(u_i)| over the last axis."""
    return -np.mean(np.abs(clip_action(u, env.bounds)), axis=-1)


def penalty_bandit_reward_parts(u, c: float, bounds: Optional[ActionBounds] = None) -> tuple[np.ndarray, np.ndarray]:
    """
    Split the penalty bandit reward.

    Returns:
        (clip-only part, pre-clip penalty part); their sum is the reward
    """
    if c < 0:
        raise ValueError(f"Penalty coefficient must be >= 0, got {c}")
    u = np.asarray(u, dtype=float)
    bounds = bounds or ActionBounds.symmetric(u.shape[-1])
    clipped_part = -np.mean(np.abs(clip_action(u, bounds)), axis=-1)
    penalty_part = -c * np.mean(u * u, axis=-1)
    return clipped_part, penalty_part


def penalty_bandit_reward(u, c: float, bounds: Optional[ActionBounds] = None) -> np.ndarray:
    """-(1/d) sum_i |clip(u_i)| - c (1/d) sum_i u_i^2."""
    clipped_part, penalty_part = penalty_bandit_reward_parts(u, c, bounds)
    return clipped_part + penalty_part


def sample_bandit_batch(
    env: BanditEnv,
    params: GaussianPolicyParams,
    rng: np.random.Generator,
    batch_size: int,
    baseline: BaselineMode = BaselineMode.BATCH_MEAN,
) -> tuple[Batch, np.ndarray]:
    """
    Draw batch_size actions from the current policy and reward them.

    Returns:
        (baselined batch, raw rewards)
    """
    states = env.states(batch_size)
    actions = sample_action(params, states, rng)
    rewards = bandit_reward(env, actions)
    batch = Batch(states=states, actions=actions, weights=rewards)
    return apply_baseline(batch, baseline), rewards


def penalty_decomposed_batch(states, actions, c: float, bounds: ActionBounds) -> DecomposedBatch:
    """
    Penalty bandit batch split for the decomposed estimator.

    The pre-clip penalty is the immediate reward; the clip-only part plays
    the continuation role since it depends on u only through clip(u).
    """
    clipped_part, penalty_part = penalty_bandit_reward_parts(actions, c, bounds)
    return DecomposedBatch(states, actions, penalty_part, clipped_part)
