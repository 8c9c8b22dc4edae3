"""
Run metrics.

Tracks wall time per experiment cell (grid point, seed x estimator run,
verification check) and per experiment run, for the end-of-run log line.
"""

import logging
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Optional

logger = logging.getLogger(__name__)


@dataclass
class ExperimentMetrics:
    """Metrics for a single experiment."""
    name: str
    runs: int = 0
    failures: int = 0
    cells: int = 0
    total_cell_seconds: float = 0.0
    last_run_seconds: Optional[float] = None

    # Recent cell durations for percentile calculation
    recent_cells: deque = field(default_factory=lambda: deque(maxlen=1000))

    def record_cell(self, seconds: float):
        self.cells += 1
        self.total_cell_seconds += seconds
        self.recent_cells.append(seconds)

    def record_run(self, seconds: float, success: bool):
        self.runs += 1
        if not success:
            self.failures += 1
        self.last_run_seconds = seconds

    @property
    def avg_cell_seconds(self) -> float:
        if self.cells == 0:
            return 0.0
        return self.total_cell_seconds / self.cells

    @property
    def p95_cell_seconds(self) -> float:
        """95th percentile cell duration."""
        if not self.recent_cells:
            return 0.0
        ordered = sorted(self.recent_cells)
        idx = int(len(ordered) * 0.95)
        return ordered[min(idx, len(ordered) - 1)]

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "failures": self.failures,
            "cells": self.cells,
            "avg_cell_seconds": round(self.avg_cell_seconds, 4),
            "p95_cell_seconds": round(self.p95_cell_seconds, 4),
            "last_run_seconds": self.last_run_seconds,
        }


class RunMetrics:
    """
    Process-wide metrics collector.

    Cells may finish on worker threads, so every update takes the lock.
    """

    _instance: Optional["RunMetrics"] = None
    _lock = threading.Lock()

    def __new__(cls):
        """Singleton pattern."""
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return

        self._initialized = True
        self._start_time = time.time()
        self._experiments: Dict[str, ExperimentMetrics] = {}
        self._lock = threading.RLock()

    def get_experiment_metrics(self, name: str) -> ExperimentMetrics:
        """Get or create metrics for an experiment."""
        with self._lock:
            if name not in self._experiments:
                self._experiments[name] = ExperimentMetrics(name=name)
            return self._experiments[name]

    def record_cell(self, experiment: str, label: str, seconds: float):
        with self._lock:
            self.get_experiment_metrics(experiment).record_cell(seconds)
        logger.info(f"{experiment}: finished {label} in {seconds:.2f}s")

    def record_run(self, experiment: str, seconds: float, success: bool):
        with self._lock:
            self.get_experiment_metrics(experiment).record_run(seconds, success)

    def reset(self):
        """Forget everything recorded so far."""
        with self._lock:
            self._experiments.clear()
            self._start_time = time.time()

    @property
    def uptime_seconds(self) -> float:
        return time.time() - self._start_time

    def get_all_stats(self) -> dict:
        with self._lock:
            return {
                "uptime_seconds": self.uptime_seconds,
                "experiments": {name: m.to_dict() for name, m in self._experiments.items()},
            }


def get_metrics() -> RunMetrics:
    """Get the global metrics collector."""
    return RunMetrics()
