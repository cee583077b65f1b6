"""GM(1,1) grey forecasting.

The model accumulates the input into a running sum, regresses each original
value on the two-point average of consecutive accumulated values (closed-form
least squares for the development coefficient ``a`` and grey action ``u``),
reconstructs the accumulated path through the exponential time response, and
restores fitted/forecast values by first differences. Fit quality is the mean
absolute relative residual Q with advisory accuracy classes.

Requires at least 4 strictly positive observations; an optional pre-shift
(recorded on the model) makes non-positive series fittable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .checks import as_vector, require_min_length, require_positive, require_same_length
from .errors import ComputationError, InputError
from .panel import IndicatorSeries

MIN_FIT_LENGTH = 4
DEFAULT_HORIZON = 10

#: Upper Q bounds for the advisory accuracy classes, best first.
ACCURACY_CLASSES = ((0.01, "excellent"), (0.05, "good"), (0.10, "qualified"), (0.20, "weak"))


def ago(values) -> np.ndarray:
    """Accumulated generating operation: running cumulative sum."""
    return np.cumsum(as_vector(values, "values"))


def iago(values) -> np.ndarray:
    """Inverse accumulation: keep the first value, then first differences."""
    v = as_vector(values, "values")
    out = np.empty_like(v)
    out[0] = v[0]
    out[1:] = v[1:] - v[:-1]
    return out


def classify_accuracy(q: float) -> str:
    for bound, name in ACCURACY_CLASSES:
        if q < bound:
            return name
    return "unqualified"


def mean_relative_residual(original, fitted) -> float:
    """Q statistic: mean of |original - fitted| / |original|."""
    orig = as_vector(original, "original")
    fit = as_vector(fitted, "fitted")
    require_same_length(orig, fit, "original", "fitted")
    zero = np.flatnonzero(orig == 0.0)
    if zero.size:
        raise ComputationError(f"relative residual undefined: original[{int(zero[0])}] is zero")
    return float(np.mean(np.abs((orig - fit) / orig)))


class GM11(BaseEstimator):
    """GM(1,1) forecaster with a fit/predict interface.

    Parameters
    ----------
    allow_shift : add a constant making the minimum value 1 before fitting
        when the series is not strictly positive; restored values are
        un-shifted and the shift is recorded in ``shift_``.
    degenerate_tol : below this |a| the exponential response is replaced by
        its analytic limit (linear accumulation, constant restored series).

    Fitted attributes: ``a_`` (development coefficient), ``u_`` (grey
    action), ``x0_`` (original series), ``n_``, ``shift_``, ``fitted_``
    (restored in-sample values, anchored so ``fitted_[0]`` equals the first
    observation exactly), ``residual_q_`` and ``accuracy_class_``.
    """

    def __init__(self, allow_shift: bool = False, degenerate_tol: float = 1e-12):
        self.allow_shift = allow_shift
        self.degenerate_tol = degenerate_tol

    def fit(self, y):
        x0 = as_vector(y, "y")
        require_min_length(x0, MIN_FIT_LENGTH, "y")

        shift = 0.0
        if x0.min() <= 0.0:
            if not self.allow_shift:
                require_positive(x0, "y")
            shift = 1.0 - float(x0.min())
        work = x0 + shift

        x1 = np.cumsum(work)
        z = 0.5 * (x1[1:] + x1[:-1])
        rhs = work[1:]

        # closed-form least squares for rhs = -a*z + u (2x2 normal equations)
        m = len(rhs)
        s_z = z.sum()
        s_zz = float(z @ z)
        s_y = rhs.sum()
        s_zy = float(z @ rhs)
        den = m * s_zz - s_z * s_z
        if den == 0.0:
            raise ComputationError("singular normal equations: accumulated series is degenerate")
        slope = (m * s_zy - s_z * s_y) / den
        self.a_ = -slope
        self.u_ = (s_y - slope * s_z) / m

        self.x0_ = x0
        self.n_ = len(x0)
        self.shift_ = shift
        self.fitted_ = self._restore(self.n_)
        self.residual_q_ = mean_relative_residual(x0, self.fitted_)
        self.accuracy_class_ = classify_accuracy(self.residual_q_)
        return self

    def _restore(self, total: int) -> np.ndarray:
        """Restored series of length ``total`` (in-sample then forecast)."""
        first = self.x0_[0] + self.shift_
        accumulated = np.empty(total)
        accumulated[0] = first
        steps = np.arange(1, total)
        if abs(self.a_) < self.degenerate_tol:
            # analytic limit of the time response as a -> 0
            accumulated[1:] = first + self.u_ * steps
        else:
            level = self.u_ / self.a_
            accumulated[1:] = (first - level) * np.exp(-self.a_ * steps) + level
        restored = np.empty(total)
        restored[0] = self.x0_[0]  # model anchors on the first observation
        restored[1:] = (accumulated[1:] - accumulated[:-1]) - self.shift_
        return restored

    def _check_fitted(self):
        if not hasattr(self, "a_"):
            raise NotFittedError("this GM11 instance is not fitted yet")

    def restored(self, horizon: int = 0) -> np.ndarray:
        """Full restored sequence: the ``n_`` in-sample values followed by
        ``horizon`` forecast steps. ``restored(0)`` reproduces ``fitted_``."""
        self._check_fitted()
        if horizon < 0:
            raise InputError(f"horizon must be >= 0, got {horizon}")
        return self._restore(self.n_ + horizon)

    def predict(self, horizon: int = DEFAULT_HORIZON) -> np.ndarray:
        """Restored forecast values for ``horizon`` steps beyond the sample."""
        return self.restored(horizon)[self.n_:]


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    index: int | None = None


def check_applicability(values) -> list[Diagnostic]:
    """Advisory pre/post-fit checks; warnings only, never blocking.

    Flags smoothness ratios (original value over previous accumulated value)
    above 0.5 from the fourth point on (the third point's ratio exceeds 0.5
    for any growing sequence, so it carries no signal), |a| >= 2 (forecast
    unreliable) and |a| >= 0.3 (long-horizon caution).
    """
    x0 = as_vector(values, "values")
    require_min_length(x0, MIN_FIT_LENGTH, "values")
    require_positive(x0, "values")
    diagnostics: list[Diagnostic] = []
    x1 = np.cumsum(x0)
    ratios = x0[3:] / x1[2:-1]
    for offset in np.flatnonzero(ratios > 0.5):
        i = int(offset) + 3
        diagnostics.append(
            Diagnostic(
                "smoothness",
                f"smoothness ratio {ratios[offset]:.4f} exceeds 0.5 at index {i}",
                index=i,
            )
        )
    a = GM11().fit(x0).a_
    if abs(a) >= 2.0:
        diagnostics.append(Diagnostic("large_a", f"|a| = {abs(a):.4f} >= 2: forecast unreliable"))
    if abs(a) >= 0.3:
        diagnostics.append(Diagnostic("moderate_a", f"|a| = {abs(a):.4f} >= 0.3: long horizons are unreliable"))
    return diagnostics


@dataclass(frozen=True)
class ForecastResult:
    """A fitted model plus its out-of-sample restored values and years."""

    model: GM11
    horizon: int
    values: tuple[float, ...]
    years: tuple[int, ...]
    series_key: str
    first_year: int


def forecast_series(
    series: IndicatorSeries,
    horizon: int = DEFAULT_HORIZON,
    allow_shift: bool = False,
) -> ForecastResult:
    """Fit a GM(1,1) model to an indicator series and forecast ``horizon``
    contiguous years past the sample. The series must have consecutive years."""
    if horizon < 0:
        raise InputError(f"horizon must be >= 0, got {horizon}")
    if not series.has_consecutive_years():
        raise InputError(
            f"series {series.key} has year gaps; fill gaps before forecasting"
        )
    model = GM11(allow_shift=allow_shift).fit(np.array(series.values))
    values = model.predict(horizon)
    years = tuple(range(series.last_year + 1, series.last_year + 1 + horizon))
    return ForecastResult(
        model=model,
        horizon=horizon,
        values=tuple(values),
        years=years,
        series_key=f"{series.country}/{series.indicator}",
        first_year=series.first_year,
    )
