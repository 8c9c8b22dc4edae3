"""
Configuration management.

Experiment settings load from:
- Flat `key = value` text files (default)
- YAML config file (.yaml / .yml)
and are overridden by command-line flags. Logging settings come from the
environment (CAPG_LOG_LEVEL, CAPG_LOG_FILE), optionally via a .env file.
"""

import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Union, get_args, get_origin, get_type_hints

import numpy as np

from .estimators import BaselineMode, EstimatorKind
from .envs import PenaltyMode, Weighting
from .optim import AdamHyper
from .policy import ActionBounds

logger = logging.getLogger(__name__)

EXPERIMENTS = ("variance", "bandit", "mdp", "verify")
ESTIMATOR_CHOICES = ("pg", "capg", "both")


class ConfigError(ValueError):
    """Raised for unreadable files, unknown keys or unparsable values"""
    pass


@dataclass
class LoggingConfig:
    """Logging settings"""
    level: str = "INFO"
    file: Optional[str] = None

    @classmethod
    def from_env(cls) -> "LoggingConfig":
        """Load logging settings from environment variables"""
        return cls(
            level=os.getenv("CAPG_LOG_LEVEL", "INFO"),
            file=os.getenv("CAPG_LOG_FILE", "").strip() or None,
        )


@dataclass
class ExperimentConfig:
    """Experiment configuration"""

    experiment: str = "bandit"
    estimator: str = "both"

    # Policy initialization
    d: int = 1
    init_mean: float = 0.0
    init_var: float = 1.0

    # Action bounds, same interval on every dimension
    lower: float = -1.0
    upper: float = 1.0

    # Sampling
    batch_size: int = 5
    updates: int = 5000
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    master_seed: int = 0
    baseline: str = "batch-mean"

    # Variance grid
    mc_batches: int = 10000
    grid_means: list[float] = field(default_factory=lambda: [0.0, 0.5, 1.0, 1.5])
    grid_vars: list[float] = field(default_factory=lambda: [0.1, 1.0, 10.0])

    # Adam
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    # Training curves
    smoothing_window: int = 100

    # Integrator MDP
    gamma: float = 0.99
    horizon: int = 20
    init_state_std: float = 1.0
    action_penalty: str = "none"
    penalty_coef: float = 0.0
    weighting: str = "gamma_t"

    # Verification
    mc_samples: int = 10_000_000
    fd_configs: int = 100

    # Execution and output
    workers: int = 1
    output_path: str = "results/output.csv"
    checkpoint_path: Optional[str] = None
    summary_path: Optional[str] = None

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        """Build from raw key/value pairs (strings or YAML scalars)."""
        unknown = sorted(set(data) - set(cls.keys()))
        if unknown:
            raise ConfigError(f"Unknown config key(s): {', '.join(unknown)}")

        hints = get_type_hints(cls)
        values = {name: _coerce(name, hints[name], raw) for name, raw in data.items()}
        return cls(**values)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        """Parse the flat `key = value` format."""
        data = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"Line {lineno}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in data:
                raise ConfigError(f"Line {lineno}: duplicate key {key!r}")
            data[key] = value
        return cls.from_mapping(data)

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """Load configuration from a flat YAML mapping"""
        import yaml

        try:
            with open(path, encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must contain a mapping")
        return cls.from_mapping(data)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """Load by suffix: YAML for .yaml/.yml, key = value otherwise."""
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        try:
            if path.suffix.lower() in (".yaml", ".yml"):
                config = cls.from_yaml(path)
            else:
                config = cls.from_text(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"Cannot read {path}: {e}") from e
        logger.info(f"Loaded config from {path}: experiment={config.experiment}")
        return config

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def validate(self) -> list[str]:
        """Validate configuration and return list of errors"""
        errors = []

        if self.experiment not in EXPERIMENTS:
            errors.append(f"experiment must be one of {', '.join(EXPERIMENTS)}")
        if self.estimator not in ESTIMATOR_CHOICES:
            errors.append(f"estimator must be one of {', '.join(ESTIMATOR_CHOICES)}")

        if self.d < 1:
            errors.append("d must be >= 1")
        if self.experiment == "mdp" and self.d != 1:
            errors.append("mdp experiment uses one-dimensional actions (d = 1)")
        if not np.isfinite(self.init_mean):
            errors.append("init_mean must be finite")
        if not self.init_var > 0 or not np.isfinite(self.init_var):
            errors.append("init_var must be positive")
        elif 0.5 * np.log(self.init_var) < -20.0:
            errors.append("init_var is below the policy's log-std floor")
        if not (np.isfinite(self.lower) and np.isfinite(self.upper) and self.lower < self.upper):
            errors.append("lower must be finite and strictly below upper")

        if self.batch_size < 1:
            errors.append("batch_size must be >= 1")
        if self.updates < 0:
            errors.append("updates must be >= 0")
        if not self.seeds:
            errors.append("seeds must be nonempty")
        elif any(s < 0 for s in self.seeds):
            errors.append("seeds must be non-negative")
        elif len(set(self.seeds)) != len(self.seeds):
            errors.append("seeds must be unique")
        if self.master_seed < 0:
            errors.append("master_seed must be non-negative")
        if self.baseline not in {m.value for m in BaselineMode}:
            errors.append(f"baseline must be one of {', '.join(m.value for m in BaselineMode)}")

        if self.mc_batches < 2:
            errors.append("mc_batches must be >= 2")
        if not self.grid_means or not self.grid_vars:
            errors.append("grid_means and grid_vars must be nonempty")
        elif any(v <= 0 for v in self.grid_vars):
            errors.append("grid_vars must be positive")
        elif any(0.5 * np.log(v) < -20.0 for v in self.grid_vars):
            errors.append("grid_vars include a variance below the policy's log-std floor")

        if not self.lr > 0 or not self.epsilon > 0:
            errors.append("lr and epsilon must be positive")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            errors.append("beta1 and beta2 must be in [0, 1)")
        if self.smoothing_window < 1:
            errors.append("smoothing_window must be >= 1")

        if not 0.0 < self.gamma <= 1.0:
            errors.append("gamma must be in (0, 1]")
        if self.horizon < 1:
            errors.append("horizon must be >= 1")
        if not self.init_state_std > 0:
            errors.append("init_state_std must be positive")
        if self.action_penalty not in {m.value for m in PenaltyMode}:
            errors.append(f"action_penalty must be one of {', '.join(m.value for m in PenaltyMode)}")
        if self.penalty_coef < 0:
            errors.append("penalty_coef must be >= 0")
        if self.weighting not in {m.value for m in Weighting}:
            errors.append(f"weighting must be one of {', '.join(m.value for m in Weighting)}")

        if self.mc_samples < 2:
            errors.append("mc_samples must be >= 2")
        if self.fd_configs < 1:
            errors.append("fd_configs must be >= 1")
        if self.workers < 1:
            errors.append("workers must be >= 1")
        if not self.output_path:
            errors.append("output_path is required")

        return errors

    @property
    def estimators(self) -> list[EstimatorKind]:
        """Estimators to run, PG first."""
        if self.estimator == "both":
            return [EstimatorKind.PG, EstimatorKind.CAPG]
        return [EstimatorKind(self.estimator)]

    @property
    def bounds(self) -> ActionBounds:
        return ActionBounds(np.full(self.d, self.lower), np.full(self.d, self.upper))

    @property
    def baseline_mode(self) -> BaselineMode:
        return BaselineMode(self.baseline)

    @property
    def adam_hyper(self) -> AdamHyper:
        return AdamHyper(lr=self.lr, beta1=self.beta1, beta2=self.beta2, epsilon=self.epsilon)


def _coerce(name: str, hint, raw):
    """Convert a raw value to the field's declared type."""
    origin = get_origin(hint)
    try:
        if origin is Union:
            # Optional[str]
            if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none")):
                return None
            return str(raw).strip()
        if origin is list:
            (item_type,) = get_args(hint)
            items = raw.split(",") if isinstance(raw, str) else list(raw)
            items = [i.strip() if isinstance(i, str) else i for i in items]
            return [_scalar(item_type, i) for i in items if i != ""]
        return _scalar(hint, raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid value for {name}: {raw!r} ({e})") from e


def _scalar(kind, raw):
    if isinstance(raw, bool):
        raise TypeError("booleans are not accepted")
    if kind is int:
        if isinstance(raw, float):
            if not raw.is_integer():
                raise ValueError("expected an integer")
            return int(raw)
        return int(str(raw).replace("_", ""))
    if kind is float:
        return float(raw)
    return str(raw).strip()
