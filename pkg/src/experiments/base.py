"""
Base classes for experiments.
"""

import logging
import os
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from ..config import ExperimentConfig
from ..metrics import get_metrics
from ..utils import write_rows

logger = logging.getLogger(__name__)


class ExperimentError(RuntimeError):
    """Raised when an experiment cannot complete, e.g. unwritable output"""
    pass


@dataclass
class ExperimentResult:
    """Result from experiment execution"""
    text: str
    success: bool = True
    exit_code: int = 0
    output_path: Optional[Path] = None
    rows: int = 0

    @classmethod
    def ok(cls, message: str, output_path: Optional[Path] = None, rows: int = 0) -> "ExperimentResult":
        return cls(text=message, output_path=output_path, rows=rows)

    @classmethod
    def failure(cls, message: str, output_path: Optional[Path] = None, rows: int = 0) -> "ExperimentResult":
        """Ran to completion but at least one check failed."""
        return cls(text=message, success=False, exit_code=1, output_path=output_path, rows=rows)

    @classmethod
    def error(cls, message: str) -> "ExperimentResult":
        return cls(text=message, success=False, exit_code=2)


@dataclass(frozen=True)
class GradientStats:
    """One variance-grid row: statistics of repeated estimates of one parameter"""
    mean: float
    var: float
    d: int
    parameter_name: str
    estimator: str
    grad_mean: float
    grad_std: float
    n_batches: int
    batch_size: int


@dataclass(frozen=True)
class CurvePoint:
    """One point of a smoothed training curve"""
    seed: int
    update_index: int
    smoothed_reward: float
    estimator: str


@dataclass(frozen=True)
class CurveSummary:
    """
    Per-run summary of a training curve.

    capg_minus_pg is the final smoothed-reward gap for the seed, repeated on
    both rows; NaN unless both estimators ran.
    """
    seed: int
    estimator: str
    final_smoothed_reward: float
    mean_smoothed_reward: float
    capg_minus_pg: float


@dataclass(frozen=True)
class CheckResult:
    """One verification row"""
    check: str
    statistic: float
    threshold: float
    passed: str

    @classmethod
    def evaluate(cls, check: str, statistic: float, threshold: float, at_most: bool = True) -> "CheckResult":
        """
        Compare a statistic with its threshold.

        Args:
            at_most: pass when statistic <= threshold; otherwise pass when
                statistic >= threshold
        """
        statistic = float(statistic)
        ok = statistic <= threshold if at_most else statistic >= threshold
        result = cls(check=check, statistic=statistic, threshold=float(threshold), passed="pass" if ok else "fail")
        if not ok:
            logger.warning(f"Check {check} failed: statistic {statistic!r}, threshold {threshold!r}")
        return result

    @property
    def ok(self) -> bool:
        return self.passed == "pass"


Cell = tuple[str, Callable[[], object]]


def run_cells(experiment: str, cells: Sequence[Cell], workers: int = 1) -> list:
    """
    Run independent cells and return their results in cell order.

    Args:
        experiment: name used for metrics
        cells: (label, zero-argument callable) pairs
        workers: thread count; 1 runs inline
    """
    metrics = get_metrics()

    def timed(cell: Cell):
        label, func = cell
        start = time.perf_counter()
        result = func()
        metrics.record_cell(experiment, label, time.perf_counter() - start)
        return result

    if workers <= 1 or len(cells) <= 1:
        return [timed(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(timed, cells))


def ensure_writable(path) -> Path:
    """
    Create the parent directory and check the file can be written.

    Raises:
        ExperimentError: if the path is a directory or not writable
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ExperimentError(f"Cannot create output directory {path.parent}: {e}") from e
    if path.is_dir():
        raise ExperimentError(f"Output path is a directory: {path}")
    target = path if path.exists() else path.parent
    if not os.access(target, os.W_OK):
        raise ExperimentError(f"Output path is not writable: {path}")
    return path


class BaseExperiment(ABC):
    """
    Base class for all experiments.

    Subclasses must define:
    - name: primary experiment name
    - description: help text
    - row_type: dataclass written to the output CSV

    Optional:
    - aliases: alternative names
    """

    name: str
    aliases: list[str] = []
    description: str
    row_type: type

    @abstractmethod
    def run(self, cfg: ExperimentConfig) -> list:
        """Compute the output rows"""
        pass

    def matches(self, name: str) -> bool:
        """Check if this experiment answers to the name"""
        name = name.lower()
        return name == self.name.lower() or name in [a.lower() for a in self.aliases]

    def write(self, rows: Sequence, path, row_type: Optional[type] = None) -> Path:
        try:
            return write_rows(rows, row_type or self.row_type, path)
        except OSError as e:
            raise ExperimentError(f"Cannot write {path}: {e}") from e

    def execute(self, cfg: ExperimentConfig) -> ExperimentResult:
        """Run, write the CSV and describe the outcome."""
        out = ensure_writable(cfg.output_path)
        rows = self.run(cfg)
        path = self.write(rows, out)
        return self.result(rows, path)

    def result(self, rows: list, path: Path) -> ExperimentResult:
        return ExperimentResult.ok(f"{self.name}: wrote {len(rows)} row(s) to {path}", path, len(rows))
