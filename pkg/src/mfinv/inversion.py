"""Numerical inversion of exponent curves and the inversion-formula check.

For a self-similar measure the direct and inverse exponents satisfy
tau(q) = -theta^{-1}(-q) and theta(p) = -tau^{-1}(-p).  Measured curves
are first made monotone by isotonic regression, then inverted by
piecewise-linear interpolation; both directions of the identity are
compared against the measured curves with delta-method error bars.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.isotonic import isotonic_regression

from .exceptions import InversionError, ValidationError
from .scaling import ExponentCurve

ERROR_BAR_FACTOR = 2.0
MIN_RELIABLE_COVERAGE = 0.3
_STDERR_FLOOR = 1e-12


def _monotone(values: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators fit; a no-op on already nondecreasing input."""
    if np.all(np.diff(values) >= 0):
        return values.copy()
    return isotonic_regression(values, increasing=True)


def _second_derivatives(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """|y''| estimates per point from divided differences (0 at the ends)."""
    n = x.size
    out = np.zeros(n)
    if n < 3:
        return out
    left = (y[1:-1] - y[:-2]) / (x[1:-1] - x[:-2])
    right = (y[2:] - y[1:-1]) / (x[2:] - x[1:-1])
    out[1:-1] = np.abs(2.0 * (right - left) / (x[2:] - x[:-2]))
    out[0] = out[1]
    out[-1] = out[-2]
    return out


def _invert_monotone(x, y, stderrs, targets):
    """Invert the piecewise-linear curve (x, y) at ``targets``.

    Returns inverted positions, their delta-method standard errors
    (floored at the local interpolation tolerance), and the local slopes.
    Targets outside [y[0], y[-1]] give NaN.
    """
    n = x.size
    ypp = _second_derivatives(x, y)
    values = np.full(len(targets), np.nan)
    errs = np.full(len(targets), np.nan)
    for k, t in enumerate(np.asarray(targets, dtype=float)):
        if t < y[0] or t > y[-1]:
            continue
        i = int(np.searchsorted(y, t, side="left"))
        if y[i] == t:
            pos = x[i]
            lo = max(i - 1, 0)
            hi = min(i + 1, n - 1)
        else:
            lo, hi = i - 1, i
            seg_slope = (y[hi] - y[lo]) / (x[hi] - x[lo])
            pos = x[lo] + (t - y[lo]) / seg_slope
        slope = (y[hi] - y[lo]) / (x[hi] - x[lo])
        slope = max(abs(slope), np.finfo(float).tiny)
        src_err = float(np.interp(pos, x, stderrs))
        width = x[hi] - x[lo]
        interp_tol = width ** 2 * max(ypp[lo], ypp[hi]) / 8.0 / slope
        values[k] = pos
        errs[k] = max(src_err / slope, interp_tol, _STDERR_FLOOR)
    return values, errs


def invert_exponent_curve(curve: ExponentCurve, targets) -> np.ndarray:
    """Order values at which the (monotonized) curve attains ``targets``.

    Monotonicity is enforced by pool-adjacent-violators before the
    piecewise-linear inversion; a target hitting a pooled flat maps to its
    left edge.  Targets outside the attained range come back NaN.
    """
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    y = _monotone(curve.exponents)
    if y[-1] - y[0] <= 0:
        raise InversionError("curve is flat after monotonic pooling; nothing to invert")
    values, _ = _invert_monotone(curve.orders, y, curve.stderrs, targets)
    return values


@dataclass(frozen=True)
class DirectionCheck:
    """One direction of the identity, evaluated on the measured curve's grid."""

    name: str
    grid: np.ndarray
    lhs: np.ndarray
    lhs_stderr: np.ndarray
    rhs: np.ndarray
    rhs_stderr: np.ndarray

    @property
    def computed(self) -> np.ndarray:
        return np.isfinite(self.rhs)

    @property
    def diffs(self) -> np.ndarray:
        return self.lhs - self.rhs

    @property
    def coverage(self) -> float:
        return float(self.computed.mean())

    @property
    def max_abs_diff(self) -> float:
        return float(np.nanmax(np.abs(self.diffs)))

    @property
    def within_error_bars(self) -> bool:
        keep = self.computed
        combined = np.hypot(self.lhs_stderr[keep], self.rhs_stderr[keep])
        return bool(np.all(np.abs(self.diffs[keep]) <= ERROR_BAR_FACTOR * combined))


@dataclass(frozen=True)
class InversionReport:
    """Both directions of the inversion identity plus the overall verdict."""

    tau_from_theta: DirectionCheck
    theta_from_tau: DirectionCheck

    @property
    def directions(self) -> tuple[DirectionCheck, DirectionCheck]:
        return (self.tau_from_theta, self.theta_from_tau)

    @property
    def max_abs_diff(self) -> float:
        return max(d.max_abs_diff for d in self.directions)

    @property
    def within_error_bars(self) -> bool:
        return all(d.within_error_bars for d in self.directions)

    @property
    def coverage(self) -> float:
        return min(d.coverage for d in self.directions)

    @property
    def reliable(self) -> bool:
        return self.coverage >= MIN_RELIABLE_COVERAGE

    def to_summary_dict(self) -> dict:
        return {
            "max_abs_diff": self.max_abs_diff,
            "within_error_bars": self.within_error_bars,
            "coverage": self.coverage,
            "reliable": self.reliable,
            "directions": {
                d.name: {
                    "max_abs_diff": d.max_abs_diff,
                    "within_error_bars": d.within_error_bars,
                    "coverage": d.coverage,
                }
                for d in self.directions
            },
        }

    def to_csv(self, path, header_lines=()) -> None:
        from .io import write_csv

        rows = []
        for d in self.directions:
            for g, l, ls, r, rs in zip(d.grid, d.lhs, d.lhs_stderr, d.rhs, d.rhs_stderr):
                diff = l - r
                rows.append(
                    (d.name, f"{g:.17g}", f"{l:.17g}", f"{ls:.17g}",
                     "" if np.isnan(r) else f"{r:.17g}",
                     "" if np.isnan(rs) else f"{rs:.17g}",
                     "" if np.isnan(diff) else f"{diff:.17g}")
                )
        write_csv(
            path,
            ["direction", "order", "measured", "measured_stderr",
             "inverted", "inverted_stderr", "diff"],
            rows,
            header_lines,
        )


def _direction(name: str, measured: ExponentCurve, counterpart: ExponentCurve) -> DirectionCheck:
    grid = measured.orders
    y = _monotone(counterpart.exponents)
    if y[-1] - y[0] <= 0:
        raise InversionError(
            f"{name}: counterpart curve is flat after monotonic pooling"
        )
    inverted, inv_err = _invert_monotone(counterpart.orders, y, counterpart.stderrs, -grid)
    return DirectionCheck(
        name=name,
        grid=grid,
        lhs=measured.exponents,
        lhs_stderr=measured.stderrs,
        rhs=-inverted,
        rhs_stderr=inv_err,
    )


def inversion_check(direct: ExponentCurve, inverse: ExponentCurve) -> InversionReport:
    """Evaluate tau(q) = -theta^{-1}(-q) and theta(p) = -tau^{-1}(-p).

    Comparisons happen on the measured curve's native grid; a point
    agrees when |measured - inverted| is at most twice the combined
    (quadrature) standard error.  Raises InversionError if either
    direction has no computable overlap at all.
    """
    if direct.kind == inverse.kind:
        raise ValidationError("need one direct and one inverse exponent curve")
    d1 = _direction("tau_from_theta", direct, inverse)
    d2 = _direction("theta_from_tau", inverse, direct)
    for d in (d1, d2):
        if not np.any(d.computed):
            raise InversionError(f"{d.name}: no target falls inside the attained range")
    return InversionReport(tau_from_theta=d1, theta_from_tau=d2)
