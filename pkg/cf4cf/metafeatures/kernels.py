# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Post-functions summarising a vector of values into one metafeature value.

Every kernel returns a finite float. Standard deviation, skewness and
kurtosis are 0 for vectors shorter than 3 or without variance.
"""

from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats

from cf4cf.common.exceptions import InvalidInput


def _values(v: ArrayLike) -> np.ndarray:
    values = np.asarray(v, dtype=float).ravel()
    if values.size == 0:
        raise InvalidInput("cannot summarise an empty vector")
    if not np.isfinite(values).all():
        raise InvalidInput("cannot summarise non-finite values")
    return values


def _degenerate(values: np.ndarray) -> bool:
    return values.size < 3 or np.ptp(values) == 0


def maximum(v: ArrayLike) -> float:
    return float(np.max(_values(v)))


def minimum(v: ArrayLike) -> float:
    return float(np.min(_values(v)))


def mean(v: ArrayLike) -> float:
    return float(np.mean(_values(v)))


def median(v: ArrayLike) -> float:
    return float(np.median(_values(v)))


def sd(v: ArrayLike) -> float:
    values = _values(v)
    if _degenerate(values):
        return 0.0
    return float(np.std(values, ddof=1))


def mode(v: ArrayLike) -> float:
    """
    Most frequent value, the smallest one on ties.
    """
    distinct, counts = np.unique(_values(v), return_counts=True)
    # np.unique sorts ascending and argmax takes the first maximum
    return float(distinct[np.argmax(counts)])


def entropy(v: ArrayLike) -> float:
    """
    Shannon entropy in nats of the empirical distribution of distinct values.

    Values are bucketed by exact equality.
    """
    _, counts = np.unique(_values(v), return_counts=True)
    return float(stats.entropy(counts))


def gini(v: ArrayLike) -> float:
    """
    Gini coefficient, the mean absolute difference over twice the mean.

    Raises:
        InvalidInput: if the vector holds negative values
    """
    values = _values(v)
    if (values < 0).any():
        raise InvalidInput("the Gini index is defined for non-negative values only")
    total = values.sum()
    if total == 0 or np.ptp(values) == 0:
        return 0.0
    n = values.size
    ordered = np.sort(values)
    # closed form of sum_ij |x_i - x_j| / (2 n^2 mean) over the sorted vector
    weights = 2 * np.arange(1, n + 1) - n - 1
    return float(np.dot(weights, ordered) / (n * total))


def skewness(v: ArrayLike) -> float:
    """
    Sample skewness g1.
    """
    values = _values(v)
    if _degenerate(values):
        return 0.0
    return float(stats.skew(values, bias=True))


def kurtosis(v: ArrayLike) -> float:
    """
    Excess kurtosis g2.
    """
    values = _values(v)
    if _degenerate(values):
        return 0.0
    return float(stats.kurtosis(values, fisher=True, bias=True))


post_functions: dict[str, Callable[[ArrayLike], float]] = {
    "max": maximum,
    "min": minimum,
    "mean": mean,
    "sd": sd,
    "median": median,
    "mode": mode,
    "entropy": entropy,
    "gini": gini,
    "skewness": skewness,
    "kurtosis": kurtosis,
}
