"""
Experiment dispatcher - routes experiment names to their runners.

Supports:
- Experiment aliases (e.g. var -> variance)
- Unknown name handling with a closest-match suggestion
- Conversion of raised errors into error results
"""

import logging
import time
from typing import Optional

from ..config import ConfigError, ExperimentConfig
from ..metrics import get_metrics
from .base import BaseExperiment, ExperimentError, ExperimentResult

logger = logging.getLogger(__name__)


def levenshtein_distance(s1: str, s2: str) -> int:
    """Calculate Levenshtein distance between two strings."""
    if len(s1) < len(s2):
        return levenshtein_distance(s2, s1)
    if len(s2) == 0:
        return len(s1)

    prev_row = range(len(s2) + 1)
    for i, c1 in enumerate(s1):
        curr_row = [i + 1]
        for j, c2 in enumerate(s2):
            insertions = prev_row[j + 1] + 1
            deletions = curr_row[j] + 1
            substitutions = prev_row[j] + (c1 != c2)
            curr_row.append(min(insertions, deletions, substitutions))
        prev_row = curr_row
    return prev_row[-1]


class ExperimentDispatcher:
    """Registry of experiments by name and alias."""

    def __init__(self):
        self.experiments: dict[str, BaseExperiment] = {}

    def register(self, experiment: BaseExperiment):
        """Register an experiment"""
        self.experiments[experiment.name.lower()] = experiment
        for alias in experiment.aliases:
            self.experiments[alias.lower()] = experiment
        logger.debug(f"Registered experiment: {experiment.name} (aliases: {experiment.aliases})")

    def get(self, name: str) -> Optional[BaseExperiment]:
        return self.experiments.get(name.lower())

    def names(self) -> list[str]:
        """Every accepted name, primary names first."""
        primary = [e.name for e in self.get_experiments()]
        return primary + [n for n in self.experiments if n not in primary]

    def run(self, name: str, cfg: ExperimentConfig) -> ExperimentResult:
        """Execute an experiment and record its wall time."""
        experiment = self.get(name)
        if not experiment:
            suggestion = self._find_closest(name)
            msg = f"Unknown experiment: {name}"
            if suggestion:
                msg += f" (did you mean: {suggestion}?)"
            return ExperimentResult.error(msg)

        metrics = get_metrics()
        start = time.perf_counter()
        try:
            logger.info(f"Running {experiment.name} -> {cfg.output_path}")
            result = experiment.execute(cfg)
        except (ConfigError, ExperimentError) as e:
            logger.error(f"{experiment.name} failed: {e}")
            result = ExperimentResult.error(str(e))
        except Exception as e:
            logger.exception(f"Error running experiment {experiment.name}")
            result = ExperimentResult.error(f"Internal error: {type(e).__name__}: {e}")

        elapsed = time.perf_counter() - start
        metrics.record_run(experiment.name, elapsed, result.success)
        logger.info(f"{experiment.name} finished in {elapsed:.2f}s (exit code {result.exit_code})")
        return result

    def _find_closest(self, typo: str) -> Optional[str]:
        """Find closest experiment name using Levenshtein distance."""
        best_match = None
        best_distance = float("inf")

        for name in self.experiments:
            distance = levenshtein_distance(typo.lower(), name)
            if distance < best_distance and distance <= 2:
                best_distance = distance
                best_match = self.experiments[name].name

        return best_match

    def get_experiments(self) -> list[BaseExperiment]:
        """Get unique list of registered experiments"""
        seen = set()
        experiments = []
        for experiment in self.experiments.values():
            if experiment.name not in seen:
                seen.add(experiment.name)
                experiments.append(experiment)
        return experiments
