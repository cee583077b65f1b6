"""Closed-form line fitting, Pearson correlation, and change-rate metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .checks import as_vector, require_min_length, require_same_length
from .errors import ComputationError, InputError
from .panel import IndicatorSeries


@dataclass(frozen=True)
class LinearModel:
    """A fitted (or externally supplied) line ``y = slope*x + intercept``.

    ``r_squared`` and ``n_points`` are populated by :func:`ols_fit`; they stay
    ``None`` for models built from published coefficients.
    """

    slope: float
    intercept: float
    r_squared: float | None = None
    n_points: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
            raise InputError("slope and intercept must be finite")
        if self.n_points is not None and self.n_points < 2:
            raise InputError(f"n_points must be >= 2, got {self.n_points}")
        if self.r_squared is not None and not (-1e-12 <= self.r_squared <= 1 + 1e-12):
            raise InputError(f"r_squared out of [0, 1]: {self.r_squared}")


def ols_fit(x, y) -> LinearModel:
    """Least-squares line through (x, y) via centered closed-form sums.

    ``r_squared`` is 1 - SSE/SST, with the convention r_squared = 1 when the
    targets are constant (SST = 0, perfectly fit by the horizontal line).
    """
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    require_same_length(xv, yv)
    require_min_length(xv, 2, "x")
    x_mean = xv.mean()
    y_mean = yv.mean()
    dx = xv - x_mean
    s_xx = float(dx @ dx)
    if s_xx == 0.0:
        raise ComputationError("cannot fit a line: x values are all equal")
    slope = float(dx @ (yv - y_mean)) / s_xx
    intercept = float(y_mean - slope * x_mean)
    residuals = yv - (slope * xv + intercept)
    sse = float(residuals @ residuals)
    sst = float((yv - y_mean) @ (yv - y_mean))
    if sst == 0.0:
        r_squared = 1.0
    else:
        r_squared = min(1.0, max(0.0, 1.0 - sse / sst))
    return LinearModel(slope=slope, intercept=intercept, r_squared=r_squared, n_points=len(xv))


def apply_linear(model: LinearModel, x):
    """Evaluate ``slope*x + intercept``; accepts scalars or arrays."""
    if np.isscalar(x):
        return model.slope * x + model.intercept
    return model.slope * np.asarray(x, dtype=float) + model.intercept


def pearson(x, y) -> float:
    """Sample Pearson product-moment correlation."""
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    require_same_length(xv, yv)
    require_min_length(xv, 2, "x")
    dx = xv - xv.mean()
    dy = yv - yv.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ComputationError("correlation undefined: an input has zero variance")
    return float(dx @ dy) / math.sqrt(sxx * syy)


def pct_change_values(values) -> np.ndarray:
    """Year-over-year percent changes: 100 * (v[k] - v[k-1]) / v[k-1]."""
    v = as_vector(values, "values")
    require_min_length(v, 2, "values")
    zero = np.flatnonzero(v[:-1] == 0.0)
    if zero.size:
        raise ComputationError(f"percent change undefined: zero denominator at index {int(zero[0])}")
    return 100.0 * (v[1:] - v[:-1]) / v[:-1]


def pct_change(series: IndicatorSeries) -> IndicatorSeries:
    """Percent-change series keyed by the later year of each consecutive pair."""
    if not series.has_consecutive_years():
        raise InputError(f"series {series.key} has year gaps; percent change needs consecutive years")
    changes = pct_change_values(np.array(series.values))
    return IndicatorSeries(
        country=series.country,
        indicator=f"{series.indicator}_PCT_CHANGE",
        unit="percent per year",
        observations=dict(zip(series.years[1:], changes.tolist())),
    )


@dataclass(frozen=True)
class ImpactScore:
    """Mean absolute year-over-year percent change; closer to zero means the
    series is more stable."""

    series_label: str
    pct_changes: tuple[tuple[int, float], ...]
    mean_abs_pct_change: float


def climate_impact_score(series: IndicatorSeries) -> ImpactScore:
    changes = pct_change(series)
    values = np.array(changes.values)
    return ImpactScore(
        series_label=f"{series.country}/{series.indicator}",
        pct_changes=tuple(zip(changes.years, changes.values)),
        mean_abs_pct_change=float(np.mean(np.abs(values))),
    )


def trend_correlation(x: IndicatorSeries, y: IndicatorSeries, basis: str = "levels") -> float:
    """Pearson correlation of two indicator series over their common years.

    ``basis="levels"`` correlates the raw values; ``basis="diffs"`` correlates
    first differences (common years must then be consecutive).
    """
    common = sorted(set(x.years) & set(y.years))
    if len(common) < 2:
        raise InputError(
            f"series {x.key} and {y.key} share {len(common)} year(s); need at least 2"
        )
    xv = np.array([x.observations[year] for year in common])
    yv = np.array([y.observations[year] for year in common])
    if basis == "levels":
        return pearson(xv, yv)
    if basis == "diffs":
        if common[-1] - common[0] + 1 != len(common):
            raise InputError("diffs basis needs consecutive common years")
        return pearson(np.diff(xv), np.diff(yv))
    raise InputError(f"unknown correlation basis {basis!r} (expected 'levels' or 'diffs')")
