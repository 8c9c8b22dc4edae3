"""
Base types for diagonal Gaussian policies.

A policy maps a state feature vector s (length k, possibly empty) to a
diagonal Gaussian over R^d with mean W s + b and standard deviation
exp(log_std). Parameters, bounds and scores are immutable values.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

# Below this, branch probabilities underflow and scores explode.
LOG_STD_FLOOR = -20.0


class PolicyError(ValueError):
    """Raised for invalid policy parameters or bounds"""
    pass


def _frozen(values, name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float, ndmin=ndim)
    if arr.ndim != ndim:
        raise PolicyError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PolicyError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ActionBounds:
    """Per-dimension clip interval [lower, upper] of the executable action set."""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen(self.lower, "lower", 1)
        upper = _frozen(self.upper, "upper", 1)
        if lower.shape != upper.shape:
            raise PolicyError(f"Bound shapes differ: {lower.shape} vs {upper.shape}")
        if lower.size == 0:
            raise PolicyError("Bounds need at least one dimension")
        if np.any(lower >= upper):
            raise PolicyError("Every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def symmetric(cls, d: int, limit: float = 1.0) -> "ActionBounds":
        """[-limit, limit]^d"""
        return cls(lower=np.full(d, -limit), upper=np.full(d, limit))

    @property
    def dim(self) -> int:
        return self.lower.size


@dataclass(frozen=True)
class GaussianPolicyParams:
    """
    Mean-head and log-std parameters of a diagonal Gaussian policy.

    Attributes:
        weights: (d, k) mean-head weights; k = 0 for state-independent policies
        bias: (d,) mean-head bias
        log_std: (d,) log standard deviation per dimension
    """
    weights: np.ndarray
    bias: np.ndarray
    log_std: np.ndarray

    def __post_init__(self):
        bias = _frozen(self.bias, "bias", 1)
        log_std = _frozen(self.log_std, "log_std", 1)
        weights = np.array(self.weights, dtype=float)
        if weights.size == 0:
            weights = weights.reshape(bias.size, 0)
        weights = _frozen(weights, "weights", 2)

        d = bias.size
        if d < 1:
            raise PolicyError("Policy needs at least one action dimension")
        if log_std.shape != (d,) or weights.shape[0] != d:
            raise PolicyError(
                f"Inconsistent dimensions: bias {bias.shape}, log_std {log_std.shape}, "
                f"weights {weights.shape}"
            )
        if np.any(log_std < LOG_STD_FLOOR):
            raise PolicyError(f"log_std below floor {LOG_STD_FLOOR}: {log_std}")

        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "log_std", log_std)

    @classmethod
    def state_independent(cls, mean, log_std) -> "GaussianPolicyParams":
        """Bandit policy: mu_i = b_i, no state features."""
        bias = np.atleast_1d(np.asarray(mean, dtype=float))
        return cls(
            weights=np.zeros((bias.size, 0)),
            bias=bias,
            log_std=np.broadcast_to(np.asarray(log_std, dtype=float), bias.shape),
        )

    @classmethod
    def from_variance(cls, mean, variance, d: int, n_features: int = 0) -> "GaussianPolicyParams":
        """Policy with every dimension at the given mean and variance, zero weights."""
        if variance <= 0:
            raise PolicyError(f"Variance must be positive, got {variance}")
        return cls(
            weights=np.zeros((d, n_features)),
            bias=np.full(d, float(mean)),
            log_std=np.full(d, 0.5 * np.log(variance)),
        )

    @property
    def dim(self) -> int:
        return self.bias.size

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    @property
    def n_params(self) -> int:
        return self.weights.size + 2 * self.dim

    @property
    def std(self) -> np.ndarray:
        return np.exp(self.log_std)

    def mean(self, state) -> np.ndarray:
        """mu(s) = W s + b for a state of shape (..., k)."""
        state = np.asarray(state, dtype=float)
        if state.shape[-1:] != (self.n_features,):
            raise PolicyError(
                f"State has {state.shape[-1] if state.ndim else 0} features, "
                f"policy expects {self.n_features}"
            )
        return state @ self.weights.T + self.bias

    def flatten(self) -> np.ndarray:
        """[weights (row-major), bias, log_std] as one vector."""
        return np.concatenate([self.weights.ravel(), self.bias, self.log_std])

    def with_flat(self, flat: np.ndarray, clamp_log_std: bool = False) -> "GaussianPolicyParams":
        """New params of the same shape from a flat vector."""
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (self.n_params,):
            raise PolicyError(f"Expected {self.n_params} parameters, got {flat.shape}")
        n_w = self.weights.size
        d = self.dim
        log_std = flat[n_w + d:]
        if clamp_log_std:
            log_std = np.maximum(log_std, LOG_STD_FLOOR)
        return GaussianPolicyParams(
            weights=flat[:n_w].reshape(self.weights.shape),
            bias=flat[n_w:n_w + d],
            log_std=log_std,
        )

    def parameter_names(self) -> list[str]:
        """Names matching flatten() order: w_i_j, mu_i, logsigma_i."""
        names = [f"w_{i}_{j}" for i in range(self.dim) for j in range(self.n_features)]
        names += [f"mu_{i}" for i in range(self.dim)]
        names += [f"logsigma_{i}" for i in range(self.dim)]
        return names

    def check_bounds(self, bounds: Optional[ActionBounds]) -> None:
        if bounds is not None and bounds.dim != self.dim:
            raise PolicyError(f"Bounds have {bounds.dim} dimensions, policy has {self.dim}")


@dataclass(frozen=True)
class ScoreResult:
    """
    Gradient of a log-probability term w.r.t. all policy parameters.

    Arrays carry any leading batch axes of the inputs that produced them:
    d_weights (..., d, k), d_bias (..., d), d_log_std (..., d).
    """
    d_weights: np.ndarray
    d_bias: np.ndarray
    d_log_std: np.ndarray

    def flatten(self) -> np.ndarray:
        """(..., P) in the order of GaussianPolicyParams.flatten()."""
        lead = self.d_bias.shape[:-1]
        n_w = self.d_weights.shape[-2] * self.d_weights.shape[-1]
        return np.concatenate(
            [self.d_weights.reshape(lead + (n_w,)), self.d_bias, self.d_log_std], axis=-1
        )

    @classmethod
    def from_flat(cls, flat: np.ndarray, d: int, n_features: int) -> "ScoreResult":
        flat = np.asarray(flat, dtype=float)
        lead = flat.shape[:-1]
        n_w = d * n_features
        return cls(
            d_weights=flat[..., :n_w].reshape(lead + (d, n_features)),
            d_bias=flat[..., n_w:n_w + d],
            d_log_std=flat[..., n_w + d:],
        )

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.flatten())))
