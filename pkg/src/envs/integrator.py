"""
Clipped integrator MDP.

State s is a scalar position, the executed action a = clip(u) moves it to
s + a, and the reward is -s^2 minus an optional action penalty. Optimal
control saturates the bounds from distant states, so clipping matters.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..estimators import BaselineMode, Batch, DecomposedBatch, apply_baseline
from ..policy import ActionBounds, GaussianPolicyParams, PolicyError, sample_action
from .base import PenaltyMode, Trajectory, Weighting, clip_action, returns_to_go

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegratorMdp:
    """
    1-D clipped integrator.

    Attributes:
        gamma: discount in (0, 1]
        horizon: steps per episode
        bounds: action bounds (one dimension)
        init_state_std: std of s_0 ~ N(0, std^2)
        init_state: fixed s_0 instead of sampling, when set
        action_penalty: none / clipped (c a^2) / preclip (c u^2)
        penalty_coef: c >= 0
    """
    gamma: float = 0.99
    horizon: int = 20
    bounds: ActionBounds = field(default_factory=lambda: ActionBounds.symmetric(1))
    init_state_std: float = 1.0
    init_state: Optional[float] = None
    action_penalty: PenaltyMode = PenaltyMode.NONE
    penalty_coef: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "action_penalty", PenaltyMode(self.action_penalty))
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.bounds.dim != 1:
            raise ValueError("Integrator actions are one-dimensional")
        if not self.init_state_std > 0:
            raise ValueError(f"init_state_std must be positive, got {self.init_state_std}")
        if self.penalty_coef < 0:
            raise ValueError(f"penalty_coef must be >= 0, got {self.penalty_coef}")


def mdp_step(env: IntegratorMdp, s, u):
    """
    Advance one step.

    Args:
        env: the MDP
        s: state(s), scalar or shape (n,)
        u: pre-clip action(s), scalar or shape (n,) / (n, 1)

    Returns:
        (next state, reward), same shape as s
    """
    s_arr = np.asarray(s, dtype=float)
    u_arr = np.asarray(u, dtype=float).reshape(s_arr.shape)
    a = clip_action(u_arr[..., None], env.bounds)[..., 0]

    s_next = s_arr + a
    reward = -s_arr * s_arr
    if env.action_penalty is PenaltyMode.CLIPPED:
        reward = reward - env.penalty_coef * a * a
    elif env.action_penalty is PenaltyMode.PRECLIP:
        reward = reward - env.penalty_coef * u_arr * u_arr

    if s_arr.ndim == 0:
        return float(s_next), float(reward)
    return s_next, reward


def rollouts(
    env: IntegratorMdp,
    params: GaussianPolicyParams,
    rng: np.random.Generator,
    n_episodes: int,
) -> list[Trajectory]:
    """
    Simulate n episodes in lockstep.

    Draw order: all initial states, then one action per episode per step.
    """
    if params.dim != 1 or params.n_features != 1:
        raise PolicyError("Integrator policies need d = 1 and one state feature")

    horizon = env.horizon
    if env.init_state is None:
        s = rng.normal(0.0, env.init_state_std, n_episodes)
    else:
        s = np.full(n_episodes, float(env.init_state))

    states = np.zeros((horizon, n_episodes))
    pre_clip = np.zeros((horizon, n_episodes))
    rewards = np.zeros((horizon, n_episodes))

    for t in range(horizon):
        states[t] = s
        u = sample_action(params, s[:, None], rng)[:, 0]
        pre_clip[t] = u
        s, rewards[t] = mdp_step(env, s, u)

    returns = returns_to_go(rewards, env.gamma)
    next_returns = np.vstack([returns[1:], np.zeros((1, n_episodes))])
    discount = env.gamma ** np.arange(horizon)
    clipped = clip_action(pre_clip[..., None], env.bounds)

    return [
        Trajectory(
            states=states[:, e, None],
            pre_clip_actions=pre_clip[:, e, None],
            clipped_actions=clipped[:, e],
            rewards=rewards[:, e],
            discounted_weights=discount.copy(),
            returns_to_go=returns[:, e],
            next_returns_to_go=next_returns[:, e],
            gamma=env.gamma,
        )
        for e in range(n_episodes)
    ]


def rollout(env: IntegratorMdp, params: GaussianPolicyParams, rng: np.random.Generator) -> Trajectory:
    """Simulate one episode."""
    return rollouts(env, params, rng, 1)[0]


def _scale(traj: Trajectory, weighting: Weighting) -> np.ndarray:
    if Weighting(weighting) is Weighting.GAMMA_T:
        return traj.discounted_weights
    return np.ones(len(traj))


def trajectories_to_batch(
    trajectories: Sequence[Trajectory],
    baseline: BaselineMode = BaselineMode.BATCH_MEAN,
    weighting: Weighting = Weighting.GAMMA_T,
) -> Batch:
    """
    Stack episodes into one batch of (s_t, u_t, w_t).

    w_t = gamma^t * G_t (gamma_t) or G_t (flat); the baseline is applied
    across the whole batch.
    """
    batch = Batch(
        states=np.concatenate([t.states for t in trajectories]),
        actions=np.concatenate([t.pre_clip_actions for t in trajectories]),
        weights=np.concatenate([_scale(t, weighting) * t.returns_to_go for t in trajectories]),
    )
    return apply_baseline(batch, baseline)


def trajectory_to_batch(
    traj: Trajectory,
    baseline: BaselineMode = BaselineMode.BATCH_MEAN,
    weighting: Weighting = Weighting.GAMMA_T,
) -> Batch:
    """Single-episode trajectories_to_batch."""
    return trajectories_to_batch([traj], baseline, weighting)


def trajectories_to_decomposed_batch(
    trajectories: Sequence[Trajectory],
    baseline: BaselineMode = BaselineMode.BATCH_MEAN,
    weighting: Weighting = Weighting.GAMMA_T,
) -> DecomposedBatch:
    """
    Stack episodes for the decomposed estimator.

    Immediate part: scale_t * r_t. Continuation: scale_t * gamma * G_{t+1}
    minus the batch baseline (a constant, so it may sit on either term).
    """
    scales = [_scale(t, weighting) for t in trajectories]
    immediate = np.concatenate([s * t.rewards for s, t in zip(scales, trajectories)])
    continuation = np.concatenate(
        [s * t.gamma * t.next_returns_to_go for s, t in zip(scales, trajectories)]
    )
    if BaselineMode(baseline) is BaselineMode.BATCH_MEAN:
        total = np.concatenate([s * t.returns_to_go for s, t in zip(scales, trajectories)])
        continuation = continuation - np.mean(total)

    return DecomposedBatch(
        states=np.concatenate([t.states for t in trajectories]),
        actions=np.concatenate([t.pre_clip_actions for t in trajectories]),
        immediate_rewards=immediate,
        continuation_weights=continuation,
    )
