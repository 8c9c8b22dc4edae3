"""
Integrator MDP training curves.

Every update simulates batch_size episodes, turns them into one baselined
batch and takes an Adam step. With the pre-clip action penalty, CAPG runs
use the decomposed estimator so the penalty keeps the conventional score.
The curve records the mean undiscounted episode return per update.
"""

import logging

import numpy as np

from ..config import ExperimentConfig
from ..envs import (
    IntegratorMdp,
    PenaltyMode,
    Weighting,
    rollouts,
    trajectories_to_batch,
    trajectories_to_decomposed_batch,
)
from ..estimators import EstimatorKind, estimate, estimate_decomposed
from ..policy import ActionBounds, GaussianPolicyParams
from ..utils import derive_rng
from .base import BaseExperiment, CurvePoint, run_cells
from .training import TrainingRun, ascend, finish_training, initial_optimizer, training_cells

logger = logging.getLogger(__name__)


def build_mdp(cfg: ExperimentConfig) -> IntegratorMdp:
    return IntegratorMdp(
        gamma=cfg.gamma,
        horizon=cfg.horizon,
        bounds=ActionBounds([cfg.lower], [cfg.upper]),
        init_state_std=cfg.init_state_std,
        action_penalty=PenaltyMode(cfg.action_penalty),
        penalty_coef=cfg.penalty_coef,
    )


def initial_mdp_policy(cfg: ExperimentConfig) -> GaussianPolicyParams:
    """Linear-Gaussian policy on the scalar state: mu(s) = 0 * s + init_mean."""
    return GaussianPolicyParams(
        weights=np.zeros((1, 1)),
        bias=[cfg.init_mean],
        log_std=[0.5 * np.log(cfg.init_var)],
    )


def train_mdp(cfg: ExperimentConfig, seed: int, kind: EstimatorKind) -> TrainingRun:
    """One seed x estimator run."""
    env = build_mdp(cfg)
    weighting = Weighting(cfg.weighting)
    params = initial_mdp_policy(cfg)
    optimizer = initial_optimizer(cfg, params)
    rng = derive_rng(cfg.master_seed, seed, kind.value)
    decomposed = kind is EstimatorKind.CAPG and env.action_penalty is PenaltyMode.PRECLIP

    returns = np.zeros(cfg.updates)
    for t in range(cfg.updates):
        episodes = rollouts(env, params, rng, cfg.batch_size)
        returns[t] = np.mean([e.undiscounted_return for e in episodes])
        if decomposed:
            batch = trajectories_to_decomposed_batch(episodes, cfg.baseline_mode, weighting)
            gradient = estimate_decomposed(batch, params, env.bounds)
        else:
            batch = trajectories_to_batch(episodes, cfg.baseline_mode, weighting)
            gradient = estimate(batch, params, env.bounds, kind)
        params, optimizer = ascend(params, optimizer, gradient)
        logger.debug(f"seed={seed} {kind.value} update {t + 1}: return={returns[t]:.4f}")

    return TrainingRun(seed=seed, estimator=kind, rewards=returns, params=params, optimizer=optimizer)


def run_mdp_training(cfg: ExperimentConfig) -> tuple[list[CurvePoint], list[TrainingRun]]:
    """
    Train every seed x estimator on the integrator.

    Returns:
        (curve points ordered by seed, estimator, update; raw runs)
    """
    logger.info(
        f"MDP training: horizon={cfg.horizon}, gamma={cfg.gamma}, penalty={cfg.action_penalty}, "
        f"{len(cfg.seeds)} seed(s), {cfg.updates} update(s) of {cfg.batch_size} episode(s)"
    )
    runs = run_cells("mdp", training_cells(cfg, train_mdp), cfg.workers)
    points = [p for run in runs for p in run.curve(cfg.smoothing_window)]
    return points, runs


class MdpExperiment(BaseExperiment):
    """Smoothed return curves on the clipped integrator"""

    name = "mdp"
    description = "Train linear-Gaussian policies on the clipped integrator MDP"
    row_type = CurvePoint

    def run(self, cfg: ExperimentConfig) -> list[CurvePoint]:
        _, runs = run_mdp_training(cfg)
        return finish_training(self, cfg, runs)
