"""
Compensated summation.
"""

import numpy as np


def compensated_sum(values, axis: int = 0) -> np.ndarray:
    """
    Neumaier summation along one axis, in index order.

    Vectorized over every other axis, so summing many short batches at once
    gives bit-identical results to summing each batch separately.

    Args:
        values: array to reduce
        axis: axis to sum over

    Returns:
        array with `axis` removed
    """
    values = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    total = np.zeros(values.shape[1:])
    compensation = np.zeros(values.shape[1:])

    for row in values:
        t = total + row
        compensation += np.where(
            np.abs(total) >= np.abs(row),
            (total - t) + row,
            (row - t) + total,
        )
        total = t

    return total + compensation
