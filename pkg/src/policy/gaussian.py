"""
Diagonal Gaussian policy operations.

Sampling, log-densities, the conventional score grad log pi(u|s) and the
clipped-action score, which swaps the Gaussian score for the
gradient of log Phi(z_alpha) or log(1 - Phi(z_beta)) whenever a dimension
falls at or beyond its bound. All functions broadcast over leading batch
axes of state and action.
"""

import logging

import numpy as np

from ..gauss import (
    HALF_LOG_2PI,
    DomainError,
    inv_mills_lower,
    inv_mills_upper,
    std_normal_log_cdf,
    std_normal_log_sf,
    standardize,
)
from .base import ActionBounds, GaussianPolicyParams, ScoreResult

logger = logging.getLogger(__name__)


def _standardized(params: GaussianPolicyParams, state, action):
    """Return (mean, std, u, z) broadcast to a common shape."""
    mean = params.mean(state)
    std = params.std
    u = np.asarray(action, dtype=float)
    if u.shape[-1:] != (params.dim,):
        raise DomainError(f"Action must have {params.dim} dimensions, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise DomainError("Action must be finite")
    shape = np.broadcast_shapes(u.shape, mean.shape)
    mean = np.broadcast_to(mean, shape)
    u = np.broadcast_to(u, shape)
    z = standardize(u, mean, std)
    return mean, std, u, z


def _gaussian_grad(z: np.ndarray, std: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """d/dmu and d/dlog_std of a Gaussian log-density at standardized z."""
    return z / std, z * z - 1.0


def _lower_tail_grad(z_alpha: np.ndarray, std: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of log Phi(z_alpha) w.r.t. mu and log_std."""
    ratio = inv_mills_lower(z_alpha)
    return -ratio / std, -z_alpha * ratio


def _upper_tail_grad(z_beta: np.ndarray, std: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of log(1 - Phi(z_beta)) w.r.t. mu and log_std."""
    ratio = inv_mills_upper(z_beta)
    return ratio / std, z_beta * ratio


def _chain_weights(d_bias: np.ndarray, state) -> np.ndarray:
    """Mean-head weight gradients: dL/dW_ij = dL/dmu_i * s_j."""
    state = np.asarray(state, dtype=float)
    return d_bias[..., :, None] * state[..., None, :]


def sample_action(params: GaussianPolicyParams, state, rng: np.random.Generator) -> np.ndarray:
    """
    Draw pre-clip actions u ~ N(mu(s), diag(sigma^2)).

    Args:
        params: policy parameters
        state: (..., k) state features; use shape (n, 0) for n bandit draws
        rng: numpy Generator; consumes one standard normal per action element

    Returns:
        (..., d) unclipped actions
    """
    mean = params.mean(state)
    return mean + params.std * rng.standard_normal(mean.shape)


def log_prob(params: GaussianPolicyParams, state, action) -> np.ndarray:
    """Sum over dimensions of the Gaussian log-density."""
    _, _, _, z = _standardized(params, state, action)
    return np.sum(-params.log_std - HALF_LOG_2PI - 0.5 * z * z, axis=-1)


def score_pg(params: GaussianPolicyParams, state, action) -> ScoreResult:
    """Conventional score: gradient of log pi(u|s) w.r.t. all parameters."""
    _, std, _, z = _standardized(params, state, action)
    d_bias, d_log_std = _gaussian_grad(z, std)
    return ScoreResult(
        d_weights=_chain_weights(d_bias, state),
        d_bias=d_bias,
        d_log_std=d_log_std,
    )


def score_capg(params: GaussianPolicyParams, state, action, bounds: ActionBounds) -> ScoreResult:
    """
    Clipped-action score at a pre-clip action u.

    Per dimension: u_i <= alpha_i uses grad log Phi(z_alpha), u_i >= beta_i
    uses grad log(1 - Phi(z_beta)), anything strictly inside uses the
    Gaussian score. Contributions are summed across dimensions through the
    shared parameter layout.
    """
    params.check_bounds(bounds)
    mean, std, u, z = _standardized(params, state, action)
    d_bias, d_log_std = _gaussian_grad(z, std)
    std_full = np.broadcast_to(std, u.shape)

    lower = u <= bounds.lower
    if np.any(lower):
        z_alpha = ((bounds.lower - mean) / std)[lower]
        d_bias[lower], d_log_std[lower] = _lower_tail_grad(z_alpha, std_full[lower])

    upper = u >= bounds.upper
    if np.any(upper):
        z_beta = ((bounds.upper - mean) / std)[upper]
        d_bias[upper], d_log_std[upper] = _upper_tail_grad(z_beta, std_full[upper])

    return ScoreResult(
        d_weights=_chain_weights(d_bias, state),
        d_bias=d_bias,
        d_log_std=d_log_std,
    )


def log_prob_clipped(params: GaussianPolicyParams, state, clipped_action, bounds: ActionBounds) -> np.ndarray:
    """
    Log-density of the clipped distribution w.r.t. Lebesgue plus endpoint atoms.

    Endpoints are detected by exact equality; clipping yields bit-exact
    bound values.

    Raises:
        DomainError: if any action lies outside [lower, upper]
    """
    params.check_bounds(bounds)
    mean, std, u, z = _standardized(params, state, clipped_action)
    if np.any(u < bounds.lower) or np.any(u > bounds.upper):
        raise DomainError("Clipped action lies outside the action bounds")

    log_density = -params.log_std - HALF_LOG_2PI - 0.5 * z * z

    at_lower = u == bounds.lower
    if np.any(at_lower):
        log_density[at_lower] = std_normal_log_cdf(((bounds.lower - mean) / std)[at_lower])

    at_upper = u == bounds.upper
    if np.any(at_upper):
        log_density[at_upper] = std_normal_log_sf(((bounds.upper - mean) / std)[at_upper])

    return np.sum(log_density, axis=-1)


def sample_clipped(params: GaussianPolicyParams, state, bounds: ActionBounds, rng: np.random.Generator) -> np.ndarray:
    """clip(sample_action(...), lower, upper)."""
    params.check_bounds(bounds)
    return np.clip(sample_action(params, state, rng), bounds.lower, bounds.upper)


def clip_probabilities(params: GaussianPolicyParams, state, bounds: ActionBounds) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension (P(u <= alpha), P(u >= beta)) at the given state(s)."""
    params.check_bounds(bounds)
    mean = params.mean(state)
    std = params.std
    p_lower = np.exp(std_normal_log_cdf(standardize(bounds.lower, mean, std)))
    p_upper = np.exp(std_normal_log_sf(standardize(bounds.upper, mean, std)))
    return p_lower, p_upper
