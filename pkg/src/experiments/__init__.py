"""Experiments package."""

from .bandit import BanditExperiment, run_bandit_training, train_bandit
from .base import (
    BaseExperiment,
    CheckResult,
    CurvePoint,
    CurveSummary,
    ExperimentError,
    ExperimentResult,
    GradientStats,
    ensure_writable,
    run_cells,
)
from .dispatcher import ExperimentDispatcher
from .mdp import MdpExperiment, build_mdp, initial_mdp_policy, run_mdp_training, train_mdp
from .training import TrainingRun, load_checkpoint, summarize_curves, write_checkpoints
from .variance import VarianceExperiment, run_variance_grid
from .verify import CHECKS, VerifyExperiment, run_verification

__all__ = [
    "BanditExperiment",
    "run_bandit_training",
    "train_bandit",
    "BaseExperiment",
    "CheckResult",
    "CurvePoint",
    "CurveSummary",
    "ExperimentError",
    "ExperimentResult",
    "GradientStats",
    "ensure_writable",
    "run_cells",
    "ExperimentDispatcher",
    "MdpExperiment",
    "build_mdp",
    "initial_mdp_policy",
    "run_mdp_training",
    "train_mdp",
    "TrainingRun",
    "load_checkpoint",
    "summarize_curves",
    "write_checkpoints",
    "VarianceExperiment",
    "run_variance_grid",
    "CHECKS",
    "VerifyExperiment",
    "run_verification",
]
