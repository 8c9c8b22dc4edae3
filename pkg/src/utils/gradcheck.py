"""
Finite-difference gradient checking.
"""

import logging
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)


def finite_difference(func: Callable[[np.ndarray], float], x0, eps: float = 1e-5) -> np.ndarray:
    """
    Central-difference gradient of a scalar function.

    Args:
        func: maps a flat parameter vector to a float
        x0: point of evaluation
        eps: step size

    Returns:
        gradient estimate, same shape as x0
    """
    x0 = np.asarray(x0, dtype=float)
    grad = np.zeros_like(x0)
    for j in range(x0.size):
        x = x0.copy()
        x[j] = x0[j] + eps
        f_plus = func(x)
        x[j] = x0[j] - eps
        f_minus = func(x)
        grad[j] = (f_plus - f_minus) / (2 * eps)
    return grad


def relative_error(analytic, numeric) -> float:
    """
    max_i |a_i - n_i| / max(|a_i|, |n_i|, 1).

    Components with magnitude below one are compared absolutely.
    """
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1.0)
    return float(np.max(np.abs(analytic - numeric) / scale))
