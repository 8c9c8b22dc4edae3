"""
Base types for batch policy-gradient estimation.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

import numpy as np

from ..policy import ScoreResult


class EstimatorError(ValueError):
    """Raised for malformed batches or mismatched dimensions"""
    pass


class EstimatorKind(Enum):
    """Which score the estimator averages"""
    PG = "pg"
    CAPG = "capg"


class BaselineMode(Enum):
    """Control variate subtracted from the weights"""
    NONE = "none"
    BATCH_MEAN = "batch-mean"


class GradientEstimate(ScoreResult):
    """Policy-gradient estimate; same layout as ScoreResult."""
    pass


def _as_2d(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise EstimatorError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    return arr


def _check_weights(weights: np.ndarray, n: int, name: str) -> None:
    if weights.shape != (n,):
        raise EstimatorError(f"{name} must have shape ({n},), got {weights.shape}")
    if not np.all(np.isfinite(weights)):
        raise EstimatorError(f"{name} must be finite")


@dataclass(frozen=True)
class Batch:
    """
    (state, pre-clip action, weight) triples for one gradient estimate.

    Attributes:
        states: (N, k) state features (k may be 0)
        actions: (N, d) pre-clip actions
        weights: (N,) Q / return / advantage estimates
    """
    states: np.ndarray
    actions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        actions = _as_2d(self.actions, "actions")
        n = actions.shape[0]
        if n == 0:
            raise EstimatorError("Batch must be nonempty")
        states = np.asarray(self.states, dtype=float)
        if states.ndim != 2 or states.shape[0] != n:
            raise EstimatorError(f"states must have shape ({n}, k), got {states.shape}")
        weights = np.asarray(self.weights, dtype=float)
        _check_weights(weights, n, "weights")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_entries(cls, entries: Iterable[tuple]) -> "Batch":
        """Build from (state, action, weight) tuples."""
        entries = list(entries)
        if not entries:
            raise EstimatorError("Batch must be nonempty")
        states, actions, weights = zip(*entries)
        try:
            return cls(
                states=np.array([np.atleast_1d(np.asarray(s, dtype=float)) for s in states]),
                actions=np.array([np.atleast_1d(np.asarray(a, dtype=float)) for a in actions]),
                weights=np.array(weights, dtype=float),
            )
        except ValueError as e:
            if isinstance(e, EstimatorError):
                raise
            # Ragged entries
            raise EstimatorError(f"Batch entries have inconsistent shapes: {e}") from e

    @property
    def size(self) -> int:
        return self.actions.shape[0]

    @property
    def dim(self) -> int:
        return self.actions.shape[1]

    def with_weights(self, weights) -> "Batch":
        return replace(self, weights=np.asarray(weights, dtype=float))

    def permuted(self, order) -> "Batch":
        order = np.asarray(order)
        return Batch(states=self.states[order], actions=self.actions[order], weights=self.weights[order])


@dataclass(frozen=True)
class DecomposedBatch:
    """
    Batch whose Q estimate is split into an immediate reward that may
    depend on the pre-clip action and a continuation weight that depends
    on it only through the clipped action.
    """
    states: np.ndarray
    actions: np.ndarray
    immediate_rewards: np.ndarray
    continuation_weights: np.ndarray

    def __post_init__(self):
        base = Batch(self.states, self.actions, self.immediate_rewards)
        continuation = np.asarray(self.continuation_weights, dtype=float)
        _check_weights(continuation, base.size, "continuation_weights")
        object.__setattr__(self, "states", base.states)
        object.__setattr__(self, "actions", base.actions)
        object.__setattr__(self, "immediate_rewards", base.weights)
        object.__setattr__(self, "continuation_weights", continuation)

    @classmethod
    def from_entries(cls, entries: Iterable[tuple]) -> "DecomposedBatch":
        """Build from (state, action, immediate_reward, continuation_weight) tuples."""
        entries = list(entries)
        if not entries:
            raise EstimatorError("Batch must be nonempty")
        states, actions, immediate, continuation = zip(*entries)
        plain = Batch.from_entries(zip(states, actions, immediate))
        return cls(plain.states, plain.actions, plain.weights, np.array(continuation, dtype=float))

    @property
    def size(self) -> int:
        return self.actions.shape[0]
