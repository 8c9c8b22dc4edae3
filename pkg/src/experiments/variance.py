"""
Gradient-variance grid.

For every (mean, variance) grid point the policy is held fixed while
mc_batches independent batches are drawn; each estimator is evaluated on
the same batches so the PG/CAPG comparison is paired.
"""

import logging
from functools import partial
from itertools import product

import numpy as np

from ..config import ExperimentConfig
from ..envs import BanditEnv, bandit_reward
from ..estimators import BaselineMode, estimate_many
from ..policy import GaussianPolicyParams, sample_action
from ..utils import derive_rng
from .base import BaseExperiment, GradientStats, run_cells

logger = logging.getLogger(__name__)


def _grid_point(cfg: ExperimentConfig, index: int, mean: float, var: float) -> list[GradientStats]:
    params = GaussianPolicyParams.from_variance(mean, var, cfg.d)
    bounds = cfg.bounds
    env = BanditEnv(cfg.d, bounds)
    rng = derive_rng(cfg.master_seed, cfg.seeds[0], "shared", index)

    n_batches, batch_size = cfg.mc_batches, cfg.batch_size
    states = np.zeros((n_batches, batch_size, 0))
    actions = sample_action(params, states, rng)
    weights = bandit_reward(env, actions)
    if cfg.baseline_mode is BaselineMode.BATCH_MEAN:
        weights = weights - weights.mean(axis=1, keepdims=True)

    names = params.parameter_names()
    rows = []
    for kind in cfg.estimators:
        estimates = estimate_many(states, actions, weights, params, bounds, kind).flatten()
        grad_mean = estimates.mean(axis=0)
        grad_std = estimates.std(axis=0, ddof=1)
        for j, name in enumerate(names):
            rows.append(GradientStats(
                mean=float(mean),
                var=float(var),
                d=cfg.d,
                parameter_name=name,
                estimator=kind.value,
                grad_mean=float(grad_mean[j]),
                grad_std=float(grad_std[j]),
                n_batches=n_batches,
                batch_size=batch_size,
            ))
    return rows


def run_variance_grid(cfg: ExperimentConfig) -> list[GradientStats]:
    """
    Per-parameter mean and std of baselined gradient estimates over the grid.

    Rows are ordered by grid point (means outer, variances inner), then
    estimator (PG first), then parameter.
    """
    cells = [
        (f"grid point mean={mean} var={var}", partial(_grid_point, cfg, index, mean, var))
        for index, (mean, var) in enumerate(product(cfg.grid_means, cfg.grid_vars))
    ]
    logger.info(f"Variance grid: {len(cells)} point(s), {cfg.mc_batches} batches of {cfg.batch_size}")
    results = run_cells("variance", cells, cfg.workers)
    return [row for rows in results for row in rows]


class VarianceExperiment(BaseExperiment):
    """Fixed-policy gradient statistics over a grid of means and variances"""

    name = "variance"
    aliases = ["var"]
    description = "Gradient mean/std per parameter over a (mean, variance) grid"
    row_type = GradientStats

    def run(self, cfg: ExperimentConfig) -> list[GradientStats]:
        return run_variance_grid(cfg)
