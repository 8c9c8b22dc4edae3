"""
Scalar standard-normal primitives.

Provides the density, log-CDF, log-survival function and the two inverse
Mills ratios that the clipped-action score is built from. All functions
accept a float or an ndarray and return the same kind.

Tail probabilities are never formed naively: log Phi(z) comes from
scipy's log_ndtr (erfc with an asymptotic series in the far left tail), and
the Mills ratios are exp(log phi - log Phi).
"""

import logging
import math
from typing import Union

import numpy as np
from scipy import special

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Standardized points beyond this magnitude are clamped (with a warning).
Z_LIMIT = 37.0

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a primitive."""
    pass


def standardize(x: ArrayLike, mean: ArrayLike, std: ArrayLike) -> ArrayLike:
    """
    Map x to z = (x - mean) / std.

    Raises:
        DomainError: if std is not strictly positive and finite
    """
    std_arr = np.asarray(std, dtype=float)
    if not np.all(np.isfinite(std_arr)) or np.any(std_arr <= 0):
        raise DomainError("Standard deviation must be strictly positive and finite")
    return (np.asarray(x, dtype=float) - mean) / std_arr


def _guard(z: ArrayLike) -> tuple[np.ndarray, bool]:
    """Validate z and clamp it into [-Z_LIMIT, Z_LIMIT]."""
    scalar = np.ndim(z) == 0
    arr = np.asarray(z, dtype=float)

    if not np.all(np.isfinite(arr)):
        raise DomainError(f"Standardized point must be finite, got {z!r}")

    outside = np.abs(arr) > Z_LIMIT
    if np.any(outside):
        logger.warning(
            f"Clamping {int(np.count_nonzero(outside))} standardized point(s) "
            f"beyond |z| > {Z_LIMIT:g}; policy may be degenerate"
        )
        arr = np.clip(arr, -Z_LIMIT, Z_LIMIT)

    return arr, scalar


def _out(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values) if scalar else values


def std_normal_pdf(z: ArrayLike) -> ArrayLike:
    """Standard normal density phi(z)."""
    arr, scalar = _guard(z)
    return _out(INV_SQRT_2PI * np.exp(-0.5 * arr * arr), scalar)


def std_normal_log_pdf(z: ArrayLike) -> ArrayLike:
    """log phi(z)."""
    arr, scalar = _guard(z)
    return _out(-0.5 * arr * arr - HALF_LOG_2PI, scalar)


def std_normal_log_cdf(z: ArrayLike) -> ArrayLike:
    """
    log Phi(z), stable in the far left tail.

    Args:
        z: finite standardized point(s)

    Returns:
        log-probability (<= 0), same shape as z

    Raises:
        DomainError: on NaN or infinite input
    """
    arr, scalar = _guard(z)
    return _out(special.log_ndtr(arr), scalar)


def std_normal_log_sf(z: ArrayLike) -> ArrayLike:
    """log(1 - Phi(z)); delegates to std_normal_log_cdf(-z)."""
    return std_normal_log_cdf(-np.asarray(z, dtype=float) if np.ndim(z) else -float(z))


def inv_mills_lower(z: ArrayLike) -> ArrayLike:
    """
    phi(z) / Phi(z), the derivative of log Phi(z).

    Behaves like -z for z -> -inf.
    """
    arr, scalar = _guard(z)
    log_ratio = -0.5 * arr * arr - HALF_LOG_2PI - special.log_ndtr(arr)
    return _out(np.exp(log_ratio), scalar)


def inv_mills_upper(z: ArrayLike) -> ArrayLike:
    """phi(z) / (1 - Phi(z)); delegates to inv_mills_lower(-z)."""
    return inv_mills_lower(-np.asarray(z, dtype=float) if np.ndim(z) else -float(z))
