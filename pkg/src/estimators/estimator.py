"""
Batch policy-gradient estimators.

PG averages weight times the conventional score, CAPG averages weight
times the clipped-action score, and the decomposed estimator applies the
conventional score to the immediate (pre-clip dependent) reward and the
clipped-action score to the continuation. Per-sample terms are summed in
batch order with compensated summation.
"""

import logging
from typing import Optional

import numpy as np

from ..policy import ActionBounds, GaussianPolicyParams, ScoreResult, score_capg, score_pg
from ..utils import compensated_sum
from .base import (
    BaselineMode,
    Batch,
    DecomposedBatch,
    EstimatorError,
    EstimatorKind,
    GradientEstimate,
)

logger = logging.getLogger(__name__)


def apply_baseline(batch: Batch, mode: BaselineMode) -> Batch:
    """
    Subtract a baseline from the batch weights.

    Args:
        batch: nonempty batch
        mode: NONE returns the batch unchanged; BATCH_MEAN subtracts the
            arithmetic mean of the weights

    Returns:
        baselined batch
    """
    mode = BaselineMode(mode)
    if mode is BaselineMode.NONE:
        return batch
    return batch.with_weights(batch.weights - np.mean(batch.weights))


def _check_dims(params: GaussianPolicyParams, states: np.ndarray, actions: np.ndarray) -> None:
    if actions.shape[-1] != params.dim:
        raise EstimatorError(
            f"Batch actions have {actions.shape[-1]} dimensions, policy has {params.dim}"
        )
    if states.shape[-1] != params.n_features:
        raise EstimatorError(
            f"Batch states have {states.shape[-1]} features, policy expects {params.n_features}"
        )


def score(
    kind: EstimatorKind,
    params: GaussianPolicyParams,
    states,
    actions,
    bounds: Optional[ActionBounds],
) -> ScoreResult:
    """Conventional (PG) or clipped-action (CAPG) score at every (state, action)."""
    kind = EstimatorKind(kind)
    if kind is EstimatorKind.PG:
        return score_pg(params, states, actions)
    if bounds is None:
        raise EstimatorError("CAPG needs action bounds")
    return score_capg(params, states, actions, bounds)


def per_sample_terms(
    states,
    actions,
    weights,
    params: GaussianPolicyParams,
    bounds: Optional[ActionBounds],
    kind: EstimatorKind,
) -> np.ndarray:
    """
    weight_i * score(s_i, u_i) as flat parameter rows.

    Args:
        states: (..., N, k)
        actions: (..., N, d)
        weights: (..., N)

    Returns:
        (..., N, P)
    """
    states = np.asarray(states, dtype=float)
    actions = np.asarray(actions, dtype=float)
    _check_dims(params, states, actions)
    scores = score(kind, params, states, actions, bounds).flatten()
    return np.asarray(weights, dtype=float)[..., None] * scores


def _average(terms: np.ndarray, d: int, n_features: int) -> GradientEstimate:
    n = terms.shape[-2]
    return GradientEstimate.from_flat(compensated_sum(terms, axis=-2) / n, d, n_features)


def estimate(
    batch: Batch,
    params: GaussianPolicyParams,
    bounds: Optional[ActionBounds],
    kind: EstimatorKind,
) -> GradientEstimate:
    """
    (1/N) sum_i weight_i * score(s_i, u_i).

    Weights are used as given; apply_baseline first if wanted.

    Raises:
        EstimatorError: on dimension mismatch between batch and policy
    """
    terms = per_sample_terms(batch.states, batch.actions, batch.weights, params, bounds, kind)
    return _average(terms, params.dim, params.n_features)


def estimate_many(
    states,
    actions,
    weights,
    params: GaussianPolicyParams,
    bounds: Optional[ActionBounds],
    kind: EstimatorKind,
) -> GradientEstimate:
    """
    Estimates for M independent batches at once.

    Args:
        states: (M, B, k)
        actions: (M, B, d)
        weights: (M, B), already baselined

    Returns:
        GradientEstimate with leading axis M; row m equals
        estimate() on batch m, bit for bit when the policy has no state
        features
    """
    actions = np.asarray(actions, dtype=float)
    if actions.ndim != 3 or actions.shape[1] == 0:
        raise EstimatorError(f"actions must have shape (M, B, d) with B >= 1, got {actions.shape}")
    terms = per_sample_terms(states, actions, weights, params, bounds, kind)
    return _average(terms, params.dim, params.n_features)


def decomposed_terms(
    states,
    actions,
    immediate_rewards,
    continuation_weights,
    params: GaussianPolicyParams,
    bounds: ActionBounds,
) -> np.ndarray:
    """Per-sample decomposed terms (immediate and continuation parts summed) as flat parameter rows."""
    immediate = per_sample_terms(states, actions, immediate_rewards, params, bounds, EstimatorKind.PG)
    continuation = per_sample_terms(states, actions, continuation_weights, params, bounds, EstimatorKind.CAPG)
    return immediate + continuation


def estimate_decomposed(
    batch: DecomposedBatch,
    params: GaussianPolicyParams,
    bounds: ActionBounds,
) -> GradientEstimate:
    """
    Estimator for rewards that depend on the pre-clip action.

    The immediate reward keeps the conventional score; the continuation
    (discounted return from the next state) depends on u only through
    clip(u) and takes the clipped-action score.
    """
    terms = decomposed_terms(
        batch.states,
        batch.actions,
        batch.immediate_rewards,
        batch.continuation_weights,
        params,
        bounds,
    )
    return _average(terms, params.dim, params.n_features)
