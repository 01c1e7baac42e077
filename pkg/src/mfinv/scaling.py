"""Power-law exponent estimation from partition curves.

Fits are ordinary least squares of log partition value on log scale,
unweighted; the scaling range is found by a sliding-window search that
maximizes the mean R^2 across a few anchor orders.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import check_series
from .exceptions import FitError, RangeDetectionError, ValidationError
from .partition import PartitionCurve

MIN_FIT_POINTS = 5
MIN_WINDOW_DECADES = 1.5
R2_FLOOR = 0.95
DEFAULT_ANCHORS = (-2.0, 0.0, 2.0, 4.0)
# windows whose mean R^2 is this close to the best are ties: differences at
# this level carry no evidence, so the wider window wins
R2_TIE_TOL = 1e-3


@dataclass(frozen=True)
class ScalingFit:
    """One OLS fit of log partition value against log scale."""

    order: float
    slope: float
    stderr: float
    intercept: float
    scale_range: tuple[float, float]
    r_squared: float
    n_points: int

    def __post_init__(self):
        if self.scale_range[0] >= self.scale_range[1]:
            raise ValidationError("scale range must satisfy lo < hi")
        if self.n_points < MIN_FIT_POINTS:
            raise ValidationError(f"fit must use at least {MIN_FIT_POINTS} points")
        if self.stderr < 0:
            raise ValidationError("stderr must be nonnegative")


@dataclass(frozen=True)
class ExponentCurve:
    """Estimated scaling exponents with standard errors over an order grid."""

    orders: np.ndarray
    exponents: np.ndarray
    stderrs: np.ndarray
    kind: str
    range_used: tuple[float, float]

    def __post_init__(self):
        orders = check_series(self.orders, "orders")
        exponents = check_series(self.exponents, "exponents")
        stderrs = check_series(self.stderrs, "stderrs")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "exponents", exponents)
        object.__setattr__(self, "stderrs", stderrs)
        if orders.size > 1 and np.any(np.diff(orders) <= 0):
            raise ValidationError("orders must be strictly increasing")
        if exponents.size != orders.size or stderrs.size != orders.size:
            raise ValidationError("exponents and stderrs must align with orders")

    def to_csv(self, path, header_lines=()) -> None:
        from .io import write_csv

        rows = [
            (f"{q:.17g}", f"{t:.17g}", f"{se:.17g}")
            for q, t, se in zip(self.orders, self.exponents, self.stderrs)
        ]
        write_csv(path, ["order", "exponent", "stderr"], rows, header_lines)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Slope, intercept, slope stderr, and R^2 of y on x.

    Partition-curve residuals are serially correlated along the scale
    axis (coarse boxes aggregate fine ones), so the iid slope variance is
    scaled by the first-order AR correction (1 + rho) / (1 - rho); exact
    power laws keep stderr 0.
    """
    n = x.size
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    sxx = float(np.sum(dx * dx))
    slope = float(np.sum(dx * (y - ym)) / sxx)
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    ssr = float(np.sum(resid * resid))
    sst = float(np.sum((y - ym) ** 2))
    if n > 2 and ssr > 0.0:
        var_iid = ssr / (n - 2) / sxx
        rho = float(np.sum(resid[1:] * resid[:-1]) / ssr)
        rho = min(max(rho, 0.0), 0.95)
        stderr = float(np.sqrt(var_iid * (1.0 + rho) / (1.0 - rho)))
    else:
        stderr = 0.0
    if sst <= 1e-30:
        r_squared = 1.0
    else:
        r_squared = 1.0 - ssr / sst
    return slope, intercept, stderr, r_squared


def fit_power_law(curve: PartitionCurve, order: float,
                  scale_range: tuple[float, float] | None = None) -> ScalingFit:
    """OLS estimate of the scaling exponent at one moment order.

    Missing cells are skipped; at least MIN_FIT_POINTS usable scales are
    required inside ``scale_range`` (the full grid when omitted).
    """
    row = curve.row(order)
    scales = curve.scales
    keep = np.isfinite(row)
    if scale_range is not None:
        lo, hi = float(scale_range[0]), float(scale_range[1])
        keep &= (scales >= lo) & (scales <= hi)
    if int(keep.sum()) < MIN_FIT_POINTS:
        raise FitError(
            f"order {order}: only {int(keep.sum())} usable points, "
            f"need {MIN_FIT_POINTS}"
        )
    x = np.log(scales[keep])
    y = row[keep]
    slope, intercept, stderr, r_squared = _ols(x, y)
    used = scales[keep]
    return ScalingFit(
        order=float(order),
        slope=slope,
        stderr=stderr,
        intercept=intercept,
        scale_range=(float(used[0]), float(used[-1])),
        r_squared=r_squared,
        n_points=int(keep.sum()),
    )


def detect_scaling_range(curve: PartitionCurve, anchor_orders=None,
                         min_decades: float = MIN_WINDOW_DECADES,
                         r2_floor: float = R2_FLOOR,
                         r2_tie_tol: float = R2_TIE_TOL) -> tuple[float, float]:
    """Contiguous log-scale window maximizing mean R^2 across anchor orders.

    Windows must span at least ``min_decades``; windows within
    ``r2_tie_tol`` of the best mean R^2 count as ties, which go to the
    wider and then the lower window.  Raises RangeDetectionError when no
    window reaches ``r2_floor`` so the caller can supply a manual range.
    """
    if curve.scales.size < 10:
        raise ValidationError("scaling-range detection needs at least 10 scales")
    if anchor_orders is None:
        anchor_orders = [q for q in DEFAULT_ANCHORS
                         if np.any(np.isclose(curve.orders, q, rtol=0.0, atol=1e-12))]
    anchor_orders = list(anchor_orders)
    if not anchor_orders:
        raise ValidationError("no anchor orders available in the curve's grid")

    scales = curve.scales
    n = scales.size
    best = None  # (mean_r2, decades, lo_scale, hi_scale)
    candidates = []
    for i in range(n):
        for j in range(i + MIN_FIT_POINTS - 1, n):
            decades = np.log10(scales[j] / scales[i])
            if decades < min_decades:
                continue
            r2s = []
            try:
                for q in anchor_orders:
                    fit = fit_power_law(curve, q, (scales[i], scales[j]))
                    r2s.append(fit.r_squared)
            except FitError:
                continue
            candidates.append((float(np.mean(r2s)), float(decades),
                               float(scales[i]), float(scales[j])))
    if not candidates:
        raise RangeDetectionError(
            "no candidate window spans the minimum decades with enough points"
        )
    best_r2 = max(c[0] for c in candidates)
    if best_r2 < r2_floor:
        raise RangeDetectionError(
            f"best window R^2 {best_r2:.4f} is below the floor {r2_floor}; "
            "supply a manual scaling range"
        )
    tied = [c for c in candidates if c[0] >= best_r2 - r2_tie_tol]
    widest = max(c[1] for c in tied)
    tied = [c for c in tied if c[1] >= widest - 1e-12]
    _, _, lo, hi = min(tied, key=lambda c: c[2])
    return lo, hi


def exponent_curve(curve: PartitionCurve,
                   scale_range: tuple[float, float]) -> ExponentCurve:
    """Fit every order of ``curve`` over a common range; failed orders are dropped."""
    orders = []
    slopes = []
    errs = []
    for q in curve.orders:
        try:
            fit = fit_power_law(curve, float(q), scale_range)
        except FitError as exc:
            warnings.warn(f"dropping order {q}: {exc}", stacklevel=2)
            continue
        orders.append(float(q))
        slopes.append(fit.slope)
        errs.append(fit.stderr)
    if not orders:
        raise FitError("every order failed to fit over the given range")
    return ExponentCurve(
        orders=np.array(orders),
        exponents=np.array(slopes),
        stderrs=np.array(errs),
        kind=curve.kind,
        range_used=(float(scale_range[0]), float(scale_range[1])),
    )


@dataclass(frozen=True)
class RangeConsistency:
    """How the direct and inverse scaling-range endpoints line up.

    Each ratio is threshold / (box_size * v_mean); both must fall within
    [1/3, 3] for order-of-magnitude agreement.
    """

    ratio_lo: float
    ratio_hi: float
    consistent: bool
    direct_range: tuple[float, float]
    inverse_range: tuple[float, float]
    v_mean: float

    def to_dict(self) -> dict:
        return {
            "ratio_lo": self.ratio_lo,
            "ratio_hi": self.ratio_hi,
            "consistent": self.consistent,
            "direct_range": list(self.direct_range),
            "inverse_range": list(self.inverse_range),
            "v_mean": self.v_mean,
        }


def check_range_consistency(direct_range: tuple[float, float],
                            inverse_range: tuple[float, float],
                            v_mean: float) -> RangeConsistency:
    """Test threshold = box_size * v_mean at both ends of the detected ranges."""
    s1, s2 = float(direct_range[0]), float(direct_range[1])
    dv1, dv2 = float(inverse_range[0]), float(inverse_range[1])
    if s1 <= 0 or s2 <= 0 or dv1 <= 0 or dv2 <= 0 or v_mean <= 0:
        raise ValidationError("ranges and v_mean must be positive")
    ratio_lo = dv1 / (s1 * v_mean)
    ratio_hi = dv2 / (s2 * v_mean)
    ok = (1.0 / 3.0 <= ratio_lo <= 3.0) and (1.0 / 3.0 <= ratio_hi <= 3.0)
    return RangeConsistency(
        ratio_lo=ratio_lo,
        ratio_hi=ratio_hi,
        consistent=ok,
        direct_range=(s1, s2),
        inverse_range=(dv1, dv2),
        v_mean=float(v_mean),
    )


def legendre_spectrum(curve: ExponentCurve) -> np.ndarray:
    """Singularity spectrum points (alpha, f) from finite differences.

    alpha is the derivative of the exponent curve (central differences,
    one-sided at the ends); f = q * alpha - exponent.
    """
    q = curve.orders
    t = curve.exponents
    if q.size < 2:
        raise ValidationError("need at least two orders for a spectrum")
    alpha = np.empty_like(t)
    alpha[0] = (t[1] - t[0]) / (q[1] - q[0])
    alpha[-1] = (t[-1] - t[-2]) / (q[-1] - q[-2])
    if q.size > 2:
        alpha[1:-1] = (t[2:] - t[:-2]) / (q[2:] - q[:-2])
    f = q * alpha - t
    return np.column_stack([alpha, f])
