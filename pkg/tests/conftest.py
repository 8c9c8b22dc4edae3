"""
Pytest fixtures for capg-lab tests.
"""

import numpy as np
import pytest

from src.config import ExperimentConfig
from src.metrics import get_metrics
from src.policy import ActionBounds, GaussianPolicyParams


@pytest.fixture
def rng():
    """Fixed-seed generator"""
    return np.random.default_rng(12345)


@pytest.fixture
def unit_policy():
    """d=1 bandit policy with mean 0 and unit variance"""
    return GaussianPolicyParams.state_independent(0.0, 0.0)


@pytest.fixture
def unit_bounds():
    """[-1, 1]"""
    return ActionBounds.symmetric(1)


@pytest.fixture
def linear_policy():
    """d=2 policy with two state features"""
    return GaussianPolicyParams(
        weights=[[0.5, -1.0], [0.25, 2.0]],
        bias=[0.1, -0.3],
        log_std=[np.log(0.5), np.log(2.0)],
    )


@pytest.fixture
def small_config(tmp_path):
    """Factory for quick configs writing under tmp_path"""
    def make(**overrides) -> ExperimentConfig:
        values = dict(
            seeds=[0, 1],
            updates=50,
            batch_size=5,
            mc_batches=200,
            grid_means=[0.0, 1.0],
            grid_vars=[0.1, 1.0],
            mc_samples=20_000,
            fd_configs=20,
            horizon=5,
            output_path=str(tmp_path / "out.csv"),
        )
        values.update(overrides)
        return ExperimentConfig(**values)
    return make


@pytest.fixture(autouse=True)
def reset_metrics():
    """Start every test with empty run metrics"""
    get_metrics().reset()
    yield
