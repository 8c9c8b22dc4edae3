"""
Monte-Carlo summary statistics.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class RunningMoments:
    """
    Chunked mean/variance accumulator.

    Chunks are merged with the pairwise update of Chan et al., so a
    10^7-sample run can be streamed in pieces of any size.

    Usage:
        moments = RunningMoments()
        for chunk in chunks:
            moments.update(chunk)   # shape (n, ...)
        moments.mean, moments.variance()
    """
    count: int = 0
    mean: Optional[np.ndarray] = None
    m2: Optional[np.ndarray] = field(default=None, repr=False)

    def update(self, chunk) -> None:
        chunk = np.asarray(chunk, dtype=float)
        n = chunk.shape[0]
        if n == 0:
            return

        chunk_mean = chunk.mean(axis=0)
        chunk_m2 = np.sum((chunk - chunk_mean) ** 2, axis=0)

        if self.count == 0:
            self.count = n
            self.mean = chunk_mean
            self.m2 = chunk_m2
            return

        total = self.count + n
        delta = chunk_mean - self.mean
        self.mean = self.mean + delta * (n / total)
        self.m2 = self.m2 + chunk_m2 + delta * delta * (self.count * n / total)
        self.count = total

    def variance(self, ddof: int = 1) -> np.ndarray:
        if self.count <= ddof:
            raise ValueError(f"Need more than {ddof} samples for a variance")
        return self.m2 / (self.count - ddof)

    def std_error(self) -> np.ndarray:
        """Standard error of the mean."""
        return np.sqrt(self.variance() / self.count)


def z_score(difference, *std_errors) -> np.ndarray:
    """|difference| in units of the combined (root-sum-square) standard error."""
    combined = np.sqrt(sum(np.asarray(se, dtype=float) ** 2 for se in std_errors))
    difference = np.abs(np.asarray(difference, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(combined > 0, difference / combined, np.where(difference > 0, np.inf, 0.0))


def trailing_mean(values, window: int) -> np.ndarray:
    """Mean over the previous min(window, t) values at every position t."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return values
    cumulative = np.concatenate([[0.0], np.cumsum(values)])
    idx = np.arange(1, values.size + 1)
    start = np.maximum(idx - window, 0)
    return (cumulative[idx] - cumulative[start]) / (idx - start)
