"""
Bandit training curves.

Each (seed, estimator) run starts from the configured policy and repeats:
sample a batch, reward it, subtract the batch-mean baseline, estimate the
gradient and take an Adam ascent step. The curve records the reward of the
last action of every batch, smoothed over the trailing window.
"""

import logging

import numpy as np

from ..config import ExperimentConfig
from ..envs import BanditEnv, sample_bandit_batch
from ..estimators import EstimatorKind, estimate
from ..policy import GaussianPolicyParams
from ..utils import derive_rng
from .base import BaseExperiment, CurvePoint, run_cells
from .training import TrainingRun, ascend, finish_training, initial_optimizer, training_cells

logger = logging.getLogger(__name__)


def train_bandit(cfg: ExperimentConfig, seed: int, kind: EstimatorKind) -> TrainingRun:
    """One seed x estimator run."""
    bounds = cfg.bounds
    env = BanditEnv(cfg.d, bounds)
    params = GaussianPolicyParams.from_variance(cfg.init_mean, cfg.init_var, cfg.d)
    optimizer = initial_optimizer(cfg, params)
    rng = derive_rng(cfg.master_seed, seed, kind.value)

    rewards = np.zeros(cfg.updates)
    for t in range(cfg.updates):
        batch, raw = sample_bandit_batch(env, params, rng, cfg.batch_size, cfg.baseline_mode)
        rewards[t] = raw[-1]
        gradient = estimate(batch, params, bounds, kind)
        params, optimizer = ascend(params, optimizer, gradient)
        if (t + 1) % 1000 == 0:
            logger.debug(f"seed={seed} {kind.value} update {t + 1}: mean={params.bias} log_std={params.log_std}")

    return TrainingRun(seed=seed, estimator=kind, rewards=rewards, params=params, optimizer=optimizer)


def run_bandit_training(cfg: ExperimentConfig) -> tuple[list[CurvePoint], list[TrainingRun]]:
    """
    Train every seed x estimator.

    Returns:
        (curve points ordered by seed, estimator, update; raw runs)
    """
    logger.info(
        f"Bandit training: d={cfg.d}, {len(cfg.seeds)} seed(s), {cfg.updates} update(s) "
        f"of batch {cfg.batch_size}"
    )
    runs = run_cells("bandit", training_cells(cfg, train_bandit), cfg.workers)
    points = [p for run in runs for p in run.curve(cfg.smoothing_window)]
    return points, runs


class BanditExperiment(BaseExperiment):
    """Smoothed reward curves on the continuum-armed bandit"""

    name = "bandit"
    aliases = ["train"]
    description = "Train Gaussian policies on the clipped bandit with PG and CAPG"
    row_type = CurvePoint

    def run(self, cfg: ExperimentConfig) -> list[CurvePoint]:
        _, runs = run_bandit_training(cfg)
        return finish_training(self, cfg, runs)
