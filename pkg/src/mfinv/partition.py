"""Partition functions over box sizes and over exit-time thresholds.

Moment sums are evaluated in log space with max normalization so that
large positive orders on tiny box masses neither underflow nor overflow.
Exit times are the real-valued durations over which the running integral
of the piecewise-constant volatility accumulates one more threshold's
worth of mass.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import (
    check_nonnegative,
    check_order_grid,
    check_positive_scalar,
    check_series,
)
from .exceptions import DomainError, ValidationError
from .measure import VolatilitySeries, as_volatility, box_measure

DEFAULT_ORDER_MIN = -4.0
DEFAULT_ORDER_MAX = 8.0
DEFAULT_ORDER_STEP = 0.25
MIN_EXIT_COUNT = 10


@dataclass(frozen=True)
class PartitionCurve:
    """log partition values over a grid of (moment order, scale) pairs.

    ``scales`` holds box sizes in samples for the direct kind and
    volatility thresholds for the inverse kind.  Cells that cannot be
    computed are NaN and are never imputed.
    """

    orders: np.ndarray
    scales: np.ndarray
    log_values: np.ndarray  # shape (len(orders), len(scales)), NaN = missing
    kind: str

    def __post_init__(self):
        orders = check_series(self.orders, "orders")
        scales = check_series(self.scales, "scales")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "log_values", np.asarray(self.log_values, dtype=float))
        if self.kind not in ("direct", "inverse"):
            raise ValidationError(f"kind must be 'direct' or 'inverse', got {self.kind!r}")
        if scales.size > 1 and np.any(np.diff(scales) <= 0):
            raise ValidationError("scales must be strictly increasing")
        if self.log_values.shape != (orders.size, scales.size):
            raise ValidationError(
                f"log_values shape {self.log_values.shape} does not match "
                f"({orders.size}, {scales.size})"
            )

    @property
    def missing(self) -> np.ndarray:
        return ~np.isfinite(self.log_values)

    def order_index(self, order: float) -> int:
        hits = np.flatnonzero(np.isclose(self.orders, order, rtol=0.0, atol=1e-12))
        if hits.size != 1:
            raise ValidationError(f"order {order!r} not present exactly once in the grid")
        return int(hits[0])

    def row(self, order: float) -> np.ndarray:
        return self.log_values[self.order_index(order)]

    def to_csv(self, path, header_lines=()) -> None:
        from .io import write_csv

        rows = []
        for i, q in enumerate(self.orders):
            for j, s in enumerate(self.scales):
                v = self.log_values[i, j]
                rows.append(
                    (f"{q:.17g}", f"{s:.17g}", "" if np.isnan(v) else f"{v:.17g}",
                     "1" if np.isnan(v) else "0")
                )
        write_csv(path, ["order", "scale", "log_value", "missing_flag"], rows, header_lines)


@dataclass(frozen=True)
class ExitTimeSequence:
    """Successive durations over which the volatility integral gains ``threshold``."""

    threshold: float
    times: np.ndarray
    count: int
    series_length: int

    def __post_init__(self):
        times = check_series(self.times, "exit times", min_length=0)
        object.__setattr__(self, "times", times)
        if self.count != times.size:
            raise ValidationError("count disagrees with the number of exit times")
        if np.any(times <= 0):
            raise ValidationError("exit times must be positive")
        if times.sum() > self.series_length * (1 + 1e-12):
            raise ValidationError("exit times overrun the series length")

    @property
    def normalized(self) -> np.ndarray:
        """Exit times divided by series length: box masses of the inverse measure."""
        return self.times / self.series_length


def log_moment_sum(weights, q: float) -> float:
    """log(sum w**q) computed without intermediate under/overflow.

    Stable for |q| <= 20 with weights as small as 1e-300.  Order 0 counts
    every box, zero-mass ones included, so that the q=0 partition value of
    a box measure is exactly the box count.  Negative orders require
    strictly positive weights.
    """
    w = check_nonnegative(check_series(weights, "weights"), "weights")
    q = float(q)
    if q < 0 and np.any(w == 0):
        bad = int(np.flatnonzero(w == 0)[0])
        raise DomainError(f"order {q} needs positive weights but box {bad} has zero mass")
    if q == 0:
        return float(np.log(w.size))
    positive = w[w > 0]
    if positive.size == 0:
        raise DomainError("all weights are zero")
    a = q * np.log(positive)
    peak = a.max()
    return float(peak + np.log(np.exp(a - peak).sum()))


def direct_partition(vol, box_sizes, q_grid=None) -> PartitionCurve:
    """log partition values of the box measure for every (order, box size).

    Cells where a negative order meets a zero-mass box are left NaN.
    """
    vol = as_volatility(vol)
    q_grid = _resolve_orders(q_grid, "q grid")
    sizes = np.unique(np.asarray(box_sizes, dtype=int))
    if sizes.size == 0:
        raise ValidationError("box_sizes is empty")
    if np.any(sizes <= 0):
        raise ValidationError("box sizes must be positive integers")
    if np.any(sizes > len(vol)):
        raise ValidationError("box sizes must not exceed the series length")

    table = np.full((q_grid.size, sizes.size), np.nan)
    for j, s in enumerate(sizes):
        weights = box_measure(vol, int(s)).weights
        logw = _masked_log(weights)
        has_zero = bool(np.any(weights == 0))
        n_boxes = weights.size
        for i, q in enumerate(q_grid):
            if q < 0 and has_zero:
                continue  # marked missing, never fabricated
            table[i, j] = _log_moment_from_logs(logw, n_boxes, float(q))
    return PartitionCurve(orders=q_grid, scales=sizes.astype(float), log_values=table,
                          kind="direct")


def exit_times(vol, threshold: float) -> ExitTimeSequence:
    """Durations between successive level crossings of the volatility integral.

    The integrand is piecewise constant, so its integral is piecewise
    linear and the crossing times are real-valued.  Exactly
    floor(total / threshold) exit times are emitted.
    """
    vol = as_volatility(vol)
    threshold = check_positive_scalar(threshold, "threshold")
    total = vol.total
    if threshold > total:
        raise ValidationError(
            f"threshold {threshold!r} exceeds total volatility {total!r} (no exits)"
        )
    count = int(np.floor(total / threshold))
    cum = np.cumsum(vol.values)
    levels = threshold * np.arange(1, count + 1)
    levels = np.minimum(levels, cum[-1])  # guard the last level against rounding
    idx = np.searchsorted(cum, levels, side="left")
    prev = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
    crossings = idx + (levels - prev) / vol.values[idx]
    times = np.diff(np.concatenate(([0.0], crossings)))
    return ExitTimeSequence(
        threshold=threshold, times=times, count=count, series_length=len(vol)
    )


def inverse_partition(vol, thresholds, p_grid=None) -> PartitionCurve:
    """log partition values of normalized exit times for every (order, threshold).

    Thresholds yielding fewer than MIN_EXIT_COUNT exits give a missing
    column and a warning: too few exit times to estimate moments.
    """
    vol = as_volatility(vol)
    p_grid = _resolve_orders(p_grid, "p grid")
    thresholds = check_series(thresholds, "thresholds")
    if np.any(thresholds <= 0):
        raise ValidationError("thresholds must be positive")
    if thresholds.size > 1 and np.any(np.diff(thresholds) <= 0):
        raise ValidationError("thresholds must be strictly increasing")

    table = np.full((p_grid.size, thresholds.size), np.nan)
    for j, dv in enumerate(thresholds):
        ets = exit_times(vol, float(dv))
        if ets.count < MIN_EXIT_COUNT:
            warnings.warn(
                f"threshold {dv!r} produced only {ets.count} exits; column marked missing",
                stacklevel=2,
            )
            continue
        logw = np.log(ets.normalized)
        for i, p in enumerate(p_grid):
            table[i, j] = _log_moment_from_logs(logw, logw.size, float(p))
    return PartitionCurve(orders=p_grid, scales=thresholds, log_values=table, kind="inverse")


_SNAP_DECADES = 0.05


def default_box_sizes(length: int, per_decade: int = 10, s_min: int | None = None,
                      s_max: int | None = None) -> np.ndarray:
    """Roughly log-spaced integer box sizes, snapped to divisors of ``length``.

    Log-spaced targets move to the nearest divisor (in log distance) when
    one is close, so those boxes tile the series exactly; the rest stay as
    plain integers and rely on truncation.  The grid starts a decade above
    the sampling scale by default, where box statistics are meaningful.
    """
    if s_max is None:
        s_max = max(length // 10, 1)
    if s_min is None:
        s_min = 10 if s_max >= 100 else 1
    if not (1 <= s_min <= s_max <= length):
        raise ValidationError(f"need 1 <= s_min <= s_max <= {length}")
    decades = np.log10(s_max / s_min) if s_max > s_min else 0.0
    n_points = max(int(np.ceil(per_decade * decades)) + 1, 2)
    targets = np.geomspace(s_min, s_max, n_points)

    found = set()
    for d in range(1, int(np.sqrt(length)) + 1):
        if length % d == 0:
            found.add(d)
            found.add(length // d)
    divisors = np.array(sorted(d for d in found if s_min <= d <= s_max))
    sizes = []
    for t in targets:
        if divisors.size:
            nearest = divisors[np.argmin(np.abs(np.log(divisors) - np.log(t)))]
            if abs(np.log10(nearest / t)) <= _SNAP_DECADES:
                sizes.append(int(nearest))
                continue
        sizes.append(int(round(t)))
    return np.unique(sizes)


def default_thresholds(vol, per_decade: int = 10, s_min: int | None = None,
                       s_max: int | None = None) -> np.ndarray:
    """Log-spaced thresholds mirroring the default box sizes via v_mean.

    The grid spans [s_min * v_mean, s_max * v_mean] so the two pipelines
    probe matching scale ranges, except that the lower end is floored at
    the largest single-sample volatility: below that, exits fit inside
    one sample and are pure interpolation artifacts.
    """
    vol = as_volatility(vol)
    sizes = default_box_sizes(len(vol), per_decade=per_decade, s_min=s_min, s_max=s_max)
    lo = max(sizes[0] * vol.mean, float(vol.values.max()))
    hi = sizes[-1] * vol.mean
    if lo >= hi:
        raise ValidationError(
            "threshold range is empty: the largest single-sample volatility "
            f"({vol.values.max()!r}) reaches the top of the scale range"
        )
    decades = np.log10(hi / lo)
    n_points = max(int(np.ceil(per_decade * decades)) + 1, 2)
    return np.geomspace(lo, hi, n_points)


def _resolve_orders(grid, name: str) -> np.ndarray:
    if grid is None:
        grid = np.arange(
            DEFAULT_ORDER_MIN, DEFAULT_ORDER_MAX + DEFAULT_ORDER_STEP / 2, DEFAULT_ORDER_STEP
        )
    grid = check_order_grid(grid, name)
    if grid.min() < DEFAULT_ORDER_MIN or grid.max() > DEFAULT_ORDER_MAX:
        warnings.warn(
            f"{name} extends beyond [{DEFAULT_ORDER_MIN}, {DEFAULT_ORDER_MAX}]; "
            "moment estimates at extreme orders have poor statistical significance",
            stacklevel=3,
        )
    return grid


def _masked_log(weights: np.ndarray) -> np.ndarray:
    return np.log(weights[weights > 0])


def _log_moment_from_logs(logw: np.ndarray, n_boxes: int, q: float) -> float:
    if q == 0:
        return float(np.log(n_boxes))
    a = q * logw
    peak = a.max()
    return float(peak + np.log(np.exp(a - peak).sum()))
