"""Grey relational analysis: rank how closely child series track a parent.

The pipeline: divide every column by its mean (optional), take absolute
differences between the parent column and each child column, locate the
global two-pole extremes (a, b) of those differences, convert differences to
coefficients ``(a + rho*b) / (diff + rho*b)``, and average each child's
coefficient column into its relational grade. Grades lie in (0, 1]; a child
identical to the parent grades exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .checks import as_matrix, as_vector, require_min_length, require_same_length
from .errors import ComputationError, InputError
from .panel import IndicatorSeries

DEFAULT_RHO = 0.5


@dataclass(frozen=True)
class GraOptions:
    """Run options: resolution coefficient ``rho`` in (0, 1] and the
    normalization switch."""

    rho: float = DEFAULT_RHO
    normalize: bool = True

    def __post_init__(self):
        if not (0.0 < self.rho <= 1.0):
            raise InputError(f"rho must be in (0, 1], got {self.rho}")


def normalize_columns(matrix, labels: Sequence[str] | None = None) -> np.ndarray:
    """Divide each column by its arithmetic mean; output columns have mean 1.

    A zero-mean column is an error naming the column.
    """
    m = as_matrix(matrix, "matrix")
    means = m.mean(axis=0)
    zero = np.flatnonzero(means == 0.0)
    if zero.size:
        j = int(zero[0])
        name = labels[j] if labels is not None else f"column {j}"
        raise ComputationError(f"cannot normalize: {name} has zero mean")
    return m / means


def two_pole_extremes(parent, children) -> tuple[float, float]:
    """Global minimum and maximum absolute difference between the parent
    column and every child column."""
    p = as_vector(parent, "parent")
    c = as_matrix(children, "children")
    require_same_length(p, c, "parent", "children")
    diffs = np.abs(c - p[:, None])
    return float(diffs.min()), float(diffs.max())


def grey_coefficients(parent, children, rho: float = DEFAULT_RHO) -> np.ndarray:
    """Coefficient matrix ``(a + rho*b) / (|parent - child| + rho*b)``.

    Cells whose difference equals the two-pole minimum are exactly 1. The
    degenerate case b = 0 (every child identical to the parent) is defined
    as the all-ones matrix, the limit of the formula as differences vanish.
    """
    if not (0.0 < rho <= 1.0):
        raise InputError(f"rho must be in (0, 1], got {rho}")
    p = as_vector(parent, "parent")
    c = as_matrix(children, "children")
    require_same_length(p, c, "parent", "children")
    diffs = np.abs(c - p[:, None])
    a = diffs.min()
    b = diffs.max()
    if b == 0.0:
        return np.ones_like(diffs)
    rho_b = rho * b
    return (a + rho_b) / (diffs + rho_b)


def grey_grades(coefficients) -> np.ndarray:
    """Per-child grade: the arithmetic mean of its coefficient column."""
    c = as_matrix(coefficients, "coefficients")
    return c.mean(axis=0)


def rank_descending(grades: np.ndarray) -> np.ndarray:
    """Indices sorted by grade, highest first; ties keep input order."""
    return np.argsort(-np.asarray(grades), kind="stable")


@dataclass(frozen=True)
class GreyRelationalResult:
    parent_label: str
    child_labels: tuple[str, ...]
    normalized_parent: tuple[float, ...]
    normalized_children: tuple[tuple[float, ...], ...]  # (n, m)
    a: float
    b: float
    coefficients: tuple[tuple[float, ...], ...]  # (n, m)
    grades: tuple[float, ...]
    options: GraOptions

    @property
    def ranking(self) -> tuple[tuple[str, float], ...]:
        order = rank_descending(np.array(self.grades))
        return tuple((self.child_labels[i], self.grades[i]) for i in order)


class GreyRelationalAnalysis(BaseEstimator):
    """Estimator interface over the grey relational pipeline.

    Parameters
    ----------
    rho : resolution coefficient in (0, 1].
    normalize : divide columns by their means before differencing.

    ``fit(X, y)`` takes the child series as columns of X (shape ``(n, m)``)
    and the parent series as y (shape ``(n,)``); it populates ``a_``, ``b_``,
    ``coefficients_``, ``grades_`` and ``ranking_``.
    """

    def __init__(self, rho: float = DEFAULT_RHO, normalize: bool = True):
        self.rho = rho
        self.normalize = normalize

    def fit(self, X, y):
        options = GraOptions(rho=self.rho, normalize=self.normalize)
        parent = as_vector(y, "y")
        children = as_matrix(X, "X")
        require_same_length(parent, children, "y", "X")
        require_min_length(parent, 2, "y")

        if options.normalize:
            joint = np.column_stack([parent, children])
            joint = normalize_columns(joint)
            parent, children = joint[:, 0], joint[:, 1:]

        self.a_, self.b_ = two_pole_extremes(parent, children)
        self.coefficients_ = grey_coefficients(parent, children, options.rho)
        self.grades_ = grey_grades(self.coefficients_)
        self.ranking_ = rank_descending(self.grades_)
        self.normalized_parent_ = parent
        self.normalized_children_ = children
        self.n_features_in_ = children.shape[1]
        return self

    def fit_predict(self, X, y) -> np.ndarray:
        """Fit and return the per-child grades."""
        return self.fit(X, y).grades_

    def _check_fitted(self):
        if not hasattr(self, "grades_"):
            raise NotFittedError("this GreyRelationalAnalysis instance is not fitted yet")


def gra(
    parent: IndicatorSeries,
    children: Sequence[IndicatorSeries],
    options: GraOptions | None = None,
) -> GreyRelationalResult:
    """Run the full pipeline on panel series sharing one year set.

    Labels come from the indicator names (prefixed with the country when it
    differs from the parent's).
    """
    options = options or GraOptions()
    if not children:
        raise InputError("gra needs at least one child series")
    years = parent.years
    if len(years) < 2:
        raise InputError("gra needs series with at least 2 observations")
    for child in children:
        if child.years != years:
            raise InputError(
                f"child {child.key} years do not match parent {parent.key} "
                f"({child.years[0]}..{child.years[-1]} vs {years[0]}..{years[-1]})"
            )

    def label(series: IndicatorSeries) -> str:
        if series.country == parent.country:
            return series.indicator
        return f"{series.country}/{series.indicator}"

    estimator = GreyRelationalAnalysis(rho=options.rho, normalize=options.normalize)
    estimator.fit(np.column_stack([c.values for c in children]), np.array(parent.values))
    return GreyRelationalResult(
        parent_label=label(parent),
        child_labels=tuple(label(c) for c in children),
        normalized_parent=tuple(estimator.normalized_parent_),
        normalized_children=tuple(map(tuple, estimator.normalized_children_)),
        a=estimator.a_,
        b=estimator.b_,
        coefficients=tuple(map(tuple, estimator.coefficients_)),
        grades=tuple(estimator.grades_),
        options=options,
    )
