"""Utility modules."""

from .csv_io import column_names, read_rows, write_rows
from .gradcheck import finite_difference, relative_error
from .rng import STREAM_TAGS, derive_rng
from .stats import RunningMoments, trailing_mean, z_score
from .summation import compensated_sum

__all__ = [
    "column_names",
    "read_rows",
    "write_rows",
    "finite_difference",
    "relative_error",
    "STREAM_TAGS",
    "derive_rng",
    "RunningMoments",
    "trailing_mean",
    "z_score",
    "compensated_sum",
]
