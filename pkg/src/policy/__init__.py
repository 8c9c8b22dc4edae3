"""Diagonal Gaussian policies package."""

from .base import (
    LOG_STD_FLOOR,
    ActionBounds,
    GaussianPolicyParams,
    PolicyError,
    ScoreResult,
)
from .gaussian import (
    clip_probabilities,
    log_prob,
    log_prob_clipped,
    sample_action,
    sample_clipped,
    score_capg,
    score_pg,
)

__all__ = [
    "LOG_STD_FLOOR",
    "ActionBounds",
    "GaussianPolicyParams",
    "PolicyError",
    "ScoreResult",
    "clip_probabilities",
    "log_prob",
    "log_prob_clipped",
    "sample_action",
    "sample_clipped",
    "score_capg",
    "score_pg",
]
