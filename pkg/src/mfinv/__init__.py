"""Multifractal analysis of conservative measures and the exponent inversion check.

The package builds conservative volatility measures from series, computes
direct partition functions over box sizes and inverse partition functions
over exit-time thresholds, fits scaling exponents with detected scaling
ranges, and verifies that the direct and inverse exponent curves are
numerical inverses of each other.  Synthetic multiplicative cascades with
closed-form exponents provide the ground truth.
"""

from .cascade import (
    CascadeSpec,
    GeneratedMeasure,
    analytic_curve,
    analytic_tau,
    analytic_theta,
    generate_cascade,
)
from .density import PdfEstimate, TailReport, estimate_pdf, tail_diagnostics
from .estimators import (
    DirectMultifractalEstimator,
    InverseMultifractalEstimator,
    InversionFormulaChecker,
)
from .exceptions import (
    ConvergenceError,
    DomainError,
    FitError,
    InversionError,
    MfinvError,
    RangeDetectionError,
    ResourceError,
    ValidationError,
)
from .inversion import DirectionCheck, InversionReport, invert_exponent_curve, inversion_check
from .measure import (
    ConservativeMeasure,
    PriceSeries,
    VolatilitySeries,
    box_measure,
    cascade_as_volatility,
    compute_returns,
    invert_measure,
    volatility_from_returns,
)
from .partition import (
    ExitTimeSequence,
    PartitionCurve,
    default_box_sizes,
    default_thresholds,
    direct_partition,
    exit_times,
    inverse_partition,
    log_moment_sum,
)
from .scaling import (
    ExponentCurve,
    RangeConsistency,
    ScalingFit,
    check_range_consistency,
    detect_scaling_range,
    exponent_curve,
    fit_power_law,
    legendre_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "CascadeSpec",
    "GeneratedMeasure",
    "analytic_curve",
    "analytic_tau",
    "analytic_theta",
    "generate_cascade",
    "PdfEstimate",
    "TailReport",
    "estimate_pdf",
    "tail_diagnostics",
    "DirectMultifractalEstimator",
    "InverseMultifractalEstimator",
    "InversionFormulaChecker",
    "MfinvError",
    "ValidationError",
    "ResourceError",
    "ConvergenceError",
    "DomainError",
    "FitError",
    "RangeDetectionError",
    "InversionError",
    "DirectionCheck",
    "InversionReport",
    "invert_exponent_curve",
    "inversion_check",
    "ConservativeMeasure",
    "PriceSeries",
    "VolatilitySeries",
    "box_measure",
    "cascade_as_volatility",
    "compute_returns",
    "invert_measure",
    "volatility_from_returns",
    "ExitTimeSequence",
    "PartitionCurve",
    "default_box_sizes",
    "default_thresholds",
    "direct_partition",
    "exit_times",
    "inverse_partition",
    "log_moment_sum",
    "ExponentCurve",
    "RangeConsistency",
    "ScalingFit",
    "check_range_consistency",
    "detect_scaling_range",
    "exponent_curve",
    "fit_power_law",
    "legendre_spectrum",
]
