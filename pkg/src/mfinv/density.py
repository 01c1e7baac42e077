"""Probability densities of exit times normalized by their standard deviation.

Histograms are taken on x = s / sigma so distributions at different
thresholds share an axis; scaling all exit times by a constant leaves the
(x, density) points unchanged up to binning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int, check_series
from .exceptions import ValidationError
from .partition import ExitTimeSequence
from .scaling import _ols

DEFAULT_BIN_COUNT = 40
PLATEAU_MAX_VARIATION = 0.2
TAIL_R2_MARGIN = 0.02
_MIN_TAIL_BINS = 5


@dataclass(frozen=True)
class PdfEstimate:
    """Histogram density of normalized exit times at one threshold."""

    threshold: float
    sigma: float
    bin_centers: np.ndarray
    densities: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    n_samples: int

    def __post_init__(self):
        edges = check_series(self.bin_edges, "bin edges")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "bin_centers", np.asarray(self.bin_centers, dtype=float))
        object.__setattr__(self, "densities", np.asarray(self.densities, dtype=float))
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=int))
        if np.any(np.diff(edges) <= 0):
            raise ValidationError("bin edges must be strictly increasing")
        if np.any(self.densities < 0):
            raise ValidationError("densities must be nonnegative")
        integral = float(np.sum(self.densities * np.diff(edges)))
        if abs(integral - 1.0) > 0.01:
            raise ValidationError(f"density integrates to {integral!r}, expected 1 +- 0.01")

    def to_csv(self, path, header_lines=()) -> None:
        from .io import write_csv

        rows = [
            (f"{c:.17g}", f"{d:.17g}", str(int(k)))
            for c, d, k in zip(self.bin_centers, self.densities, self.counts)
        ]
        write_csv(path, ["bin_center", "density", "count"], rows, header_lines)


def estimate_pdf(exits, binning: str = "log", bin_count: int = DEFAULT_BIN_COUNT,
                 bin_edges=None) -> PdfEstimate:
    """Histogram estimate of the exit-time density on the normalized axis.

    ``exits`` may be an ExitTimeSequence or a raw sample of positive
    durations.  ``bin_edges`` (in normalized x units) overrides the
    automatic log/linear edges; empty bins keep density 0 so the estimate
    always integrates to one.
    """
    if isinstance(exits, ExitTimeSequence):
        times = exits.times
        threshold = exits.threshold
    else:
        times = check_series(exits, "exit times")
        threshold = float("nan")
    if times.size < 2:
        raise ValidationError("need at least two exit times; sigma is undefined")
    if np.any(times <= 0):
        raise ValidationError("exit times must be positive")
    if times.size < 100:
        warnings.warn(
            f"only {times.size} exit times; density estimate will be rough", stacklevel=2
        )
    sigma = float(np.std(times, ddof=1))
    if sigma == 0:
        raise ValidationError("all exit times are equal; the distribution is degenerate")
    x = times / sigma

    if bin_edges is not None:
        edges = check_series(bin_edges, "bin edges")
    else:
        bin_count = check_positive_int(bin_count, "bin_count")
        lo, hi = float(x.min()), float(x.max())
        if binning == "log":
            edges = np.geomspace(lo, hi, bin_count + 1)
        elif binning == "linear":
            edges = np.linspace(lo, hi, bin_count + 1)
        else:
            raise ValidationError(f"binning must be 'log' or 'linear', got {binning!r}")
        edges[0], edges[-1] = lo, hi

    counts, _ = np.histogram(x, bins=edges)
    kept = int(counts.sum())
    if kept == 0:
        raise ValidationError("no exit times fall inside the bin edges")
    widths = np.diff(edges)
    densities = counts / (kept * widths)
    if binning == "log" and bin_edges is None:
        centers = np.sqrt(edges[:-1] * edges[1:])
    else:
        centers = 0.5 * (edges[:-1] + edges[1:])
    return PdfEstimate(
        threshold=threshold,
        sigma=sigma,
        bin_centers=centers,
        densities=densities,
        bin_edges=edges,
        counts=counts,
        n_samples=int(times.size),
    )


@dataclass(frozen=True)
class TailReport:
    """Qualitative shape diagnostics of an exit-time density."""

    left_plateau: bool
    right_tail: str  # "exponential", "power-law", or "indeterminate"
    r2_semilog: float
    r2_loglog: float
    plateau_variation: float


def tail_diagnostics(pdf: PdfEstimate) -> TailReport:
    """Flag a flat left end and classify how the right tail decays.

    The left flag checks the relative density variation across the lowest
    decade of populated bins.  The right tail is called exponential (or
    faster) when log density is more linear in x than in log x over the
    upper half of the sample mass, power-law in the opposite case, and
    indeterminate when the two fits are within TAIL_R2_MARGIN of each
    other.
    """
    populated = pdf.counts > 0
    centers = pdf.bin_centers[populated]
    densities = pdf.densities[populated]

    x_lo = centers[0]
    window = densities[centers <= 10.0 * x_lo]
    if window.size >= 2:
        variation = float((window.max() - window.min()) / window.max())
        left_plateau = variation <= PLATEAU_MAX_VARIATION
    else:
        variation = float("nan")
        left_plateau = False

    cum_mass = np.cumsum(pdf.counts) / pdf.counts.sum()
    tail_start = int(np.searchsorted(cum_mass, 0.5))
    tail = populated & (np.arange(pdf.counts.size) >= tail_start)
    xs = pdf.bin_centers[tail]
    ys = np.log(pdf.densities[tail])
    if xs.size < _MIN_TAIL_BINS:
        return TailReport(left_plateau, "indeterminate", float("nan"), float("nan"), variation)

    _, _, _, r2_semilog = _ols(xs, ys)
    _, _, _, r2_loglog = _ols(np.log(xs), ys)
    if r2_semilog - r2_loglog >= TAIL_R2_MARGIN:
        label = "exponential"
    elif r2_loglog - r2_semilog >= TAIL_R2_MARGIN:
        label = "power-law"
    else:
        label = "indeterminate"
    return TailReport(left_plateau, label, float(r2_semilog), float(r2_loglog), variation)
