"""Conservative measures built from series, and their discrete inverses.

The volatility measure assigns each box of ``box_size`` samples the
fraction of total absolute log-return it contains; by construction the
box masses sum to one.  Inverting a conservative measure replaces it by
the normalized lengths over which its cumulative mass function climbs
through a regular grid of levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive_int, check_series
from .exceptions import ValidationError

CONSERVATION_TOL = 1e-9

ORIGIN_TAGS = ("volatility", "cascade", "inverse")


@dataclass(frozen=True)
class PriceSeries:
    """Strictly positive prices sampled at a uniform step."""

    values: np.ndarray

    def __post_init__(self):
        values = check_series(self.values, "prices", min_length=2)
        if np.any(values <= 0):
            bad = int(np.flatnonzero(values <= 0)[0])
            raise ValidationError(f"price at index {bad} is {values[bad]!r}, must be > 0")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class VolatilitySeries:
    """Nonnegative volatility proxies with their total and mean."""

    values: np.ndarray
    total: float
    mean: float

    def __post_init__(self):
        values = check_nonnegative(check_series(self.values, "volatility"), "volatility")
        object.__setattr__(self, "values", values)
        if self.total <= 0:
            raise ValidationError("volatility series sums to zero; the measure is undefined")
        if abs(self.mean - self.total / values.size) > 1e-12:
            raise ValidationError("mean is inconsistent with total / length")

    @classmethod
    def from_values(cls, values) -> "VolatilitySeries":
        values = check_series(values, "volatility")
        total = float(values.sum())
        return cls(values=values, total=total, mean=total / values.size)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ConservativeMeasure:
    """Nonnegative box masses summing to one.

    ``box_size``/``length_used`` are present when the measure came from a
    series (``length_used`` is the truncated length actually covered).
    """

    weights: np.ndarray
    origin: str
    box_size: int | None = None
    length_used: int | None = None

    def __post_init__(self):
        weights = check_nonnegative(check_series(self.weights, "weights"), "weights")
        object.__setattr__(self, "weights", weights)
        if self.origin not in ORIGIN_TAGS:
            raise ValidationError(f"origin must be one of {ORIGIN_TAGS}, got {self.origin!r}")
        total = float(weights.sum())
        if abs(total - 1.0) > CONSERVATION_TOL:
            raise ValidationError(
                f"measure weights sum to {total!r}; conservation requires 1 within {CONSERVATION_TOL}"
            )

    def __len__(self) -> int:
        return len(self.weights)

    def to_csv(self, path, header_lines=()) -> None:
        from .io import write_csv

        write_csv(path, ["weight"], [(f"{w:.17g}",) for w in self.weights], header_lines)


def as_volatility(x) -> VolatilitySeries:
    """Coerce an array-like (or pass through a VolatilitySeries)."""
    if isinstance(x, VolatilitySeries):
        return x
    return VolatilitySeries.from_values(check_series(x, "volatility"))


def compute_returns(prices) -> np.ndarray:
    """Log returns ln(I_t / I_{t-1}); output is one shorter than the input."""
    if not isinstance(prices, PriceSeries):
        prices = PriceSeries(np.asarray(prices, dtype=float))
    return np.diff(np.log(prices.values))


def volatility_from_returns(returns) -> VolatilitySeries:
    """Absolute returns as the volatility proxy, with totals attached."""
    values = np.abs(check_series(returns, "returns"))
    if not np.any(values > 0):
        raise ValidationError("all returns are zero; the volatility measure is undefined")
    return VolatilitySeries.from_values(values)


def box_measure(vol, box_size: int) -> ConservativeMeasure:
    """Fraction of total volatility inside each box of ``box_size`` samples.

    The series is truncated to the largest multiple of ``box_size`` so the
    boxes tile it exactly; the truncated length is recorded on the result.
    """
    vol = as_volatility(vol)
    box_size = check_positive_int(box_size, "box_size")
    length = len(vol)
    if box_size > length:
        raise ValidationError(f"box_size {box_size} exceeds series length {length}")
    used = (length // box_size) * box_size
    sums = vol.values[:used].reshape(-1, box_size).sum(axis=1)
    total = float(sums.sum())
    if total <= 0:
        raise ValidationError("truncated series has zero total volatility")
    return ConservativeMeasure(
        weights=sums / total, origin="volatility", box_size=box_size, length_used=used
    )


def invert_measure(measure: ConservativeMeasure, grid_count: int) -> ConservativeMeasure:
    """Discrete inverse of a conservative measure on ``grid_count`` mass levels.

    The cumulative mass function M is taken piecewise-linear over the
    boxes (supported on [0, 1] after normalizing by total support
    length).  The j-th inverse weight is the distance between the
    positions where M first exceeds (j-1)/grid_count and j/grid_count;
    the final level maps to the right edge, so the weights sum to one.
    """
    grid_count = check_positive_int(grid_count, "grid_count")
    w = measure.weights
    cum = np.concatenate(([0.0], np.cumsum(w)))
    cum /= cum[-1]
    cum[-1] = 1.0
    x = np.linspace(0.0, 1.0, w.size + 1)

    positions = np.empty(grid_count)
    positions[-1] = 1.0
    if grid_count > 1:
        levels = np.arange(1, grid_count) / grid_count
        # first index with cumulative mass strictly above the level; on flat
        # stretches this lands at the right end, matching inf{a: M(a) > b}
        idx = np.searchsorted(cum, levels, side="right")
        frac = (levels - cum[idx - 1]) / (cum[idx] - cum[idx - 1])
        positions[:-1] = x[idx - 1] + frac * (x[idx] - x[idx - 1])

    inverse = np.diff(np.concatenate(([0.0], positions)))
    return ConservativeMeasure(weights=inverse, origin="inverse")


def cascade_as_volatility(generated) -> VolatilitySeries:
    """Treat cascade box masses as a synthetic volatility series."""
    return VolatilitySeries.from_values(generated.weights)
