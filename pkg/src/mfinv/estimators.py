"""Scikit-learn style front ends for the exponent-estimation pipelines.

Each estimator accepts a one-dimensional series (list, 1-D array, or
single-column 2-D array) and follows the sklearn parameter protocol, so
the analyses compose with ``clone``, pipelines, and grid search.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, clone
from sklearn.exceptions import NotFittedError

from ._validation import check_series
from .inversion import inversion_check
from .measure import (
    VolatilitySeries,
    as_volatility,
    compute_returns,
    volatility_from_returns,
)
from .partition import (
    default_box_sizes,
    default_thresholds,
    direct_partition,
    inverse_partition,
)
from .scaling import (
    check_range_consistency,
    detect_scaling_range,
    exponent_curve,
    legendre_spectrum,
)

INPUT_KINDS = ("volatility", "returns", "prices")


def _order_grid(lo: float, hi: float, step: float) -> np.ndarray:
    return np.arange(lo, hi + step / 2, step)


def _to_volatility(X, input_kind: str) -> VolatilitySeries:
    if input_kind not in INPUT_KINDS:
        raise ValueError(f"input_kind must be one of {INPUT_KINDS}, got {input_kind!r}")
    if isinstance(X, VolatilitySeries):
        return X
    series = check_series(X, "X", min_length=2)
    if input_kind == "prices":
        return volatility_from_returns(compute_returns(series))
    if input_kind == "returns":
        return volatility_from_returns(series)
    return as_volatility(series)


class _ScalingEstimatorBase(BaseEstimator):
    def _check_fitted(self):
        if not hasattr(self, "curve_"):
            raise NotFittedError(f"{type(self).__name__} has not been fitted yet")

    @property
    def orders_(self):
        self._check_fitted()
        return self.curve_.orders

    @property
    def exponents_(self):
        self._check_fitted()
        return self.curve_.exponents

    @property
    def stderrs_(self):
        self._check_fitted()
        return self.curve_.stderrs

    def legendre_spectrum(self):
        """(alpha, f) points of the fitted exponent curve."""
        self._check_fitted()
        return legendre_spectrum(self.curve_)


class DirectMultifractalEstimator(_ScalingEstimatorBase):
    """Estimate the direct scaling exponents tau(q) of a series.

    Parameters
    ----------
    q_min, q_max, q_step : moment-order grid (defaults -4..8 step 0.25).
    box_sizes : explicit integer box sizes; default is a log-spaced grid.
    scaling_range : (lo, hi) in samples; detected automatically when None.
    anchor_orders : orders scored during range detection.
    input_kind : how to read X ("volatility", "returns", or "prices").
    """

    def __init__(self, q_min=-4.0, q_max=8.0, q_step=0.25, box_sizes=None,
                 scaling_range=None, anchor_orders=None, min_decades=1.5,
                 r2_floor=0.95, per_decade=10, s_min=None, s_max=None,
                 input_kind="volatility"):
        self.q_min = q_min
        self.q_max = q_max
        self.q_step = q_step
        self.box_sizes = box_sizes
        self.scaling_range = scaling_range
        self.anchor_orders = anchor_orders
        self.min_decades = min_decades
        self.r2_floor = r2_floor
        self.per_decade = per_decade
        self.s_min = s_min
        self.s_max = s_max
        self.input_kind = input_kind

    def fit(self, X, y=None):
        vol = _to_volatility(X, self.input_kind)
        sizes = self.box_sizes
        if sizes is None:
            sizes = default_box_sizes(len(vol), per_decade=self.per_decade,
                                      s_min=self.s_min, s_max=self.s_max)
        grid = _order_grid(self.q_min, self.q_max, self.q_step)
        self.volatility_ = vol
        self.partition_ = direct_partition(vol, sizes, grid)
        if self.scaling_range is not None:
            self.scaling_range_ = (float(self.scaling_range[0]), float(self.scaling_range[1]))
        else:
            self.scaling_range_ = detect_scaling_range(
                self.partition_, self.anchor_orders,
                min_decades=self.min_decades, r2_floor=self.r2_floor,
            )
        self.curve_ = exponent_curve(self.partition_, self.scaling_range_)
        return self


class InverseMultifractalEstimator(_ScalingEstimatorBase):
    """Estimate the exit-time scaling exponents theta(p) of a series.

    Thresholds default to v_mean times a log-spaced scale grid, mirroring
    the direct pipeline through threshold = box_size * v_mean.
    """

    def __init__(self, p_min=-4.0, p_max=8.0, p_step=0.25, thresholds=None,
                 scaling_range=None, anchor_orders=None, min_decades=1.5,
                 r2_floor=0.95, per_decade=10, s_min=None, s_max=None,
                 input_kind="volatility"):
        self.p_min = p_min
        self.p_max = p_max
        self.p_step = p_step
        self.thresholds = thresholds
        self.scaling_range = scaling_range
        self.anchor_orders = anchor_orders
        self.min_decades = min_decades
        self.r2_floor = r2_floor
        self.per_decade = per_decade
        self.s_min = s_min
        self.s_max = s_max
        self.input_kind = input_kind

    def fit(self, X, y=None):
        vol = _to_volatility(X, self.input_kind)
        thresholds = self.thresholds
        if thresholds is None:
            thresholds = default_thresholds(vol, per_decade=self.per_decade,
                                            s_min=self.s_min, s_max=self.s_max)
        grid = _order_grid(self.p_min, self.p_max, self.p_step)
        self.volatility_ = vol
        self.partition_ = inverse_partition(vol, thresholds, grid)
        if self.scaling_range is not None:
            self.scaling_range_ = (float(self.scaling_range[0]), float(self.scaling_range[1]))
        else:
            self.scaling_range_ = detect_scaling_range(
                self.partition_, self.anchor_orders,
                min_decades=self.min_decades, r2_floor=self.r2_floor,
            )
        self.curve_ = exponent_curve(self.partition_, self.scaling_range_)
        return self


class InversionFormulaChecker(BaseEstimator):
    """Run both pipelines on one series and test the inversion identity.

    After ``fit``, ``report_`` carries both directions of the comparison
    and ``range_consistency_`` relates the two detected scaling ranges
    through threshold = box_size * v_mean.
    """

    def __init__(self, direct=None, inverse=None, input_kind="volatility"):
        self.direct = direct
        self.inverse = inverse
        self.input_kind = input_kind

    def fit(self, X, y=None):
        direct = clone(self.direct) if self.direct is not None else DirectMultifractalEstimator()
        inverse = clone(self.inverse) if self.inverse is not None else InverseMultifractalEstimator()
        vol = _to_volatility(X, self.input_kind)
        self.direct_ = direct.fit(vol)
        self.inverse_ = inverse.fit(vol)
        self.report_ = inversion_check(self.direct_.curve_, self.inverse_.curve_)
        self.range_consistency_ = check_range_consistency(
            self.direct_.scaling_range_, self.inverse_.scaling_range_, vol.mean
        )
        self.within_error_bars_ = self.report_.within_error_bars
        self.max_abs_diff_ = self.report_.max_abs_diff
        return self
