"""
Shared pieces of the training experiments: parameter updates, curve
assembly, summaries and checkpoints.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..config import ExperimentConfig
from ..estimators import EstimatorKind, GradientEstimate
from ..optim import AdamState, Direction, adam_step
from ..policy import LOG_STD_FLOOR, GaussianPolicyParams
from ..utils import trailing_mean
from .base import CurvePoint, CurveSummary, ExperimentError

logger = logging.getLogger(__name__)


@dataclass
class TrainingRun:
    """Outcome of one (seed, estimator) training run"""
    seed: int
    estimator: EstimatorKind
    rewards: np.ndarray
    params: GaussianPolicyParams
    optimizer: AdamState

    def curve(self, window: int) -> list[CurvePoint]:
        smoothed = trailing_mean(self.rewards, window)
        return [
            CurvePoint(seed=self.seed, update_index=t + 1, smoothed_reward=float(r), estimator=self.estimator.value)
            for t, r in enumerate(smoothed)
        ]


def ascend(
    params: GaussianPolicyParams,
    optimizer: AdamState,
    gradient: GradientEstimate,
) -> tuple[GaussianPolicyParams, AdamState]:
    """One Adam ascent step; log_std is held at its floor."""
    optimizer, flat = adam_step(optimizer, params.flatten(), gradient.flatten(), Direction.ASCEND)
    if np.any(flat[-params.dim:] < LOG_STD_FLOOR):
        logger.warning(f"log_std clamped to floor {LOG_STD_FLOOR} at step {optimizer.step_count}")
    return params.with_flat(flat, clamp_log_std=True), optimizer


def summarize_curves(points: Sequence[CurvePoint]) -> list[CurveSummary]:
    """
    Final and mean smoothed reward per (seed, estimator), plus the per-seed
    CAPG - PG final gap.

    Runs appear in first-seen order.
    """
    runs: dict[tuple[int, str], list[float]] = {}
    for p in points:
        runs.setdefault((p.seed, p.estimator), []).append(p.smoothed_reward)

    finals = {key: values[-1] for key, values in runs.items()}
    summaries = []
    for (seed, estimator), values in runs.items():
        pg = finals.get((seed, EstimatorKind.PG.value))
        capg = finals.get((seed, EstimatorKind.CAPG.value))
        gap = capg - pg if pg is not None and capg is not None else float("nan")
        summaries.append(CurveSummary(
            seed=seed,
            estimator=estimator,
            final_smoothed_reward=values[-1],
            mean_smoothed_reward=float(np.mean(values)),
            capg_minus_pg=gap,
        ))
    return summaries


def write_checkpoints(runs: Sequence[TrainingRun], directory) -> list[Path]:
    """
    One JSON file per run with final parameters and optimizer state.

    Raises:
        ExperimentError: if the directory cannot be written
    """
    directory = Path(directory)
    paths = []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for run in runs:
            path = directory / f"{run.estimator.value}-seed{run.seed}.json"
            payload = {
                "seed": run.seed,
                "estimator": run.estimator.value,
                "params": dict(zip(run.params.parameter_names(), map(float, run.params.flatten()))),
                "optimizer": run.optimizer.to_dict(),
            }
            path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
            paths.append(path)
    except OSError as e:
        raise ExperimentError(f"Cannot write checkpoints to {directory}: {e}") from e
    logger.info(f"Wrote {len(paths)} checkpoint(s) to {directory}")
    return paths


def load_checkpoint(path, like: GaussianPolicyParams) -> tuple[GaussianPolicyParams, AdamState]:
    """Restore (params, optimizer) from write_checkpoints output."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    flat = np.array([data["params"][name] for name in like.parameter_names()], dtype=float)
    return like.with_flat(flat), AdamState.from_dict(data["optimizer"])


def finish_training(experiment, cfg: ExperimentConfig, runs: Sequence[TrainingRun]) -> list[CurvePoint]:
    """Curves for all runs plus the optional summary and checkpoints."""
    points = [p for run in runs for p in run.curve(cfg.smoothing_window)]
    if cfg.summary_path:
        experiment.write(summarize_curves(points), cfg.summary_path, CurveSummary)
    if cfg.checkpoint_path:
        write_checkpoints(runs, cfg.checkpoint_path)
    return points


def training_cells(cfg: ExperimentConfig, train) -> list:
    """(label, callable) per seed x estimator, seed-major."""
    return [
        (f"seed={seed} estimator={kind.value}", lambda seed=seed, kind=kind: train(cfg, seed, kind))
        for seed in cfg.seeds
        for kind in cfg.estimators
    ]


def initial_optimizer(cfg: ExperimentConfig, params: GaussianPolicyParams) -> AdamState:
    return AdamState.zeros(params.n_params, cfg.adam_hyper)
