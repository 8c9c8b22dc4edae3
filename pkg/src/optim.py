"""
Adam for policy-gradient ascent.

One AdamState covers the whole flattened parameter vector. Updates are
pure: adam_step returns a new state and new parameters.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)


class OptimizerError(ValueError):
    """Raised for shape mismatches or non-finite gradients"""
    pass


class Direction(Enum):
    """Ascend for return maximization, descend for loss minimization"""
    ASCEND = "ascend"
    DESCEND = "descend"


@dataclass(frozen=True)
class AdamHyper:
    """Adam hyperparameters with the usual defaults"""
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not self.lr > 0:
            raise OptimizerError(f"lr must be positive, got {self.lr}")
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not 0.0 <= value < 1.0:
                raise OptimizerError(f"{name} must be in [0, 1), got {value}")
        if not self.epsilon > 0:
            raise OptimizerError(f"epsilon must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class AdamState:
    """Step counter and moment estimates for a flat parameter vector"""
    step_count: int
    first_moment: np.ndarray
    second_moment: np.ndarray
    hyper: AdamHyper = field(default_factory=AdamHyper)

    @classmethod
    def zeros(cls, n_params: int, hyper: AdamHyper = None) -> "AdamState":
        return cls(
            step_count=0,
            first_moment=np.zeros(n_params),
            second_moment=np.zeros(n_params),
            hyper=hyper or AdamHyper(),
        )

    @property
    def n_params(self) -> int:
        return self.first_moment.size

    def to_dict(self) -> dict:
        return {
            "step_count": self.step_count,
            "first_moment": [float(v) for v in self.first_moment],
            "second_moment": [float(v) for v in self.second_moment],
            "hyper": {
                "lr": self.hyper.lr,
                "beta1": self.hyper.beta1,
                "beta2": self.hyper.beta2,
                "epsilon": self.hyper.epsilon,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AdamState":
        return cls(
            step_count=int(data["step_count"]),
            first_moment=np.array(data["first_moment"], dtype=float),
            second_moment=np.array(data["second_moment"], dtype=float),
            hyper=AdamHyper(**data["hyper"]),
        )


def adam_step(
    state: AdamState,
    params: np.ndarray,
    gradient: np.ndarray,
    direction: Direction = Direction.ASCEND,
) -> tuple[AdamState, np.ndarray]:
    """
    One bias-corrected Adam update.

    The step is lr * m_hat / (sqrt(v_hat) + epsilon), added to the
    parameters when ascending and subtracted when descending.

    Args:
        state: optimizer state before the update
        params: flat parameter vector
        gradient: flat gradient, same shape
        direction: ascend or descend

    Returns:
        (new state, new params)

    Raises:
        OptimizerError: on shape mismatch or non-finite gradient
    """
    params = np.asarray(params, dtype=float)
    gradient = np.asarray(gradient, dtype=float)
    if params.shape != (state.n_params,) or gradient.shape != params.shape:
        raise OptimizerError(
            f"Shape mismatch: state {state.n_params}, params {params.shape}, gradient {gradient.shape}"
        )
    if not np.all(np.isfinite(gradient)):
        raise OptimizerError("Gradient must be finite")

    hyper = state.hyper
    t = state.step_count + 1
    m = hyper.beta1 * state.first_moment + (1.0 - hyper.beta1) * gradient
    v = hyper.beta2 * state.second_moment + (1.0 - hyper.beta2) * (gradient * gradient)

    m_hat = m / (1.0 - hyper.beta1 ** t)
    v_hat = v / (1.0 - hyper.beta2 ** t)
    step = hyper.lr * m_hat / (np.sqrt(v_hat) + hyper.epsilon)

    if Direction(direction) is Direction.DESCEND:
        step = -step

    new_state = AdamState(step_count=t, first_moment=m, second_moment=v, hyper=hyper)
    return new_state, params + step


def save_adam_state(state: AdamState, path) -> Path:
    """Write the state as JSON (floats round-trip exactly)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(state.to_dict(), indent=2), encoding="utf-8")
    logger.debug(f"Saved Adam state at step {state.step_count} to {path}")
    return path


def load_adam_state(path) -> AdamState:
    """Read a state written by save_adam_state."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return AdamState.from_dict(data)
