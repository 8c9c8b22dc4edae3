"""Policy-gradient estimators package."""

from .base import (
    BaselineMode,
    Batch,
    DecomposedBatch,
    EstimatorError,
    EstimatorKind,
    GradientEstimate,
)
from .estimator import (
    apply_baseline,
    decomposed_terms,
    estimate,
    estimate_decomposed,
    estimate_many,
    per_sample_terms,
    score,
)

__all__ = [
    "BaselineMode",
    "Batch",
    "DecomposedBatch",
    "EstimatorError",
    "EstimatorKind",
    "GradientEstimate",
    "apply_baseline",
    "decomposed_terms",
    "estimate",
    "estimate_decomposed",
    "estimate_many",
    "per_sample_terms",
    "score",
]
