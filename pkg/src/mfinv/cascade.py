"""Self-similar multiplicative cascades and their exact scaling exponents.

A cascade is described by branch probabilities ``m_i`` and contraction
ratios ``r_i``.  Its direct exponent ``tau(q)`` is the unique root of
``sum m_i**q * r_i**(-tau) = 1`` and the exponent ``theta(p)`` of the
inverse measure is obtained from the same root equation with the roles of
probabilities and ratios swapped.  These closed-form exponents serve as
the ground truth for every estimator in the package.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positive_int
from .exceptions import ConvergenceError, ResourceError, ValidationError

MAX_BOXES = 1 << 26
WEIGHT_SUM_TOL = 1e-12
ROOT_TOL = 1e-12
MAX_NEWTON_ITER = 200


@dataclass(frozen=True)
class CascadeSpec:
    """Branch probabilities and contraction ratios of a self-similar measure."""

    weights: tuple[float, ...]
    ratios: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        if len(self.weights) < 2:
            raise ValidationError("cascade needs at least 2 branches")
        if len(self.ratios) != len(self.weights):
            raise ValidationError(
                f"got {len(self.weights)} weights but {len(self.ratios)} ratios"
            )
        for i, w in enumerate(self.weights):
            if not (0.0 < w < 1.0) or not math.isfinite(w):
                raise ValidationError(f"weight {i} must lie in (0, 1), got {w!r}")
        for i, r in enumerate(self.ratios):
            if not (0.0 < r < 1.0) or not math.isfinite(r):
                raise ValidationError(f"ratio {i} must lie in (0, 1), got {r!r}")
        if abs(sum(self.weights) - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(
                f"weights must sum to 1 within {WEIGHT_SUM_TOL}, got {sum(self.weights)!r}"
            )

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def tiles_interval(self) -> bool:
        """Whether the contraction ratios cover the unit interval exactly."""
        return abs(sum(self.ratios) - 1.0) <= WEIGHT_SUM_TOL

    @property
    def equal_ratios(self) -> bool:
        return len(set(self.ratios)) == 1

    def swapped(self) -> "CascadeSpec":
        """The spec of the inverse measure: probabilities and ratios trade places."""
        return CascadeSpec(weights=self.ratios, ratios=self.weights)

    def to_json(self) -> str:
        return json.dumps({"weights": list(self.weights), "ratios": list(self.ratios)})

    @classmethod
    def from_json(cls, text: str) -> "CascadeSpec":
        data = json.loads(text)
        return cls(weights=tuple(data["weights"]), ratios=tuple(data["ratios"]))


@dataclass
class GeneratedMeasure:
    """Box masses of a cascade realized down to a finite depth.

    ``widths`` is None for equal-ratio specs, where every box has width
    ``n**-depth`` on the regular grid; for unequal ratios it holds the
    cylinder-interval widths in left-to-right order.
    """

    weights: np.ndarray
    depth: int
    spec: CascadeSpec
    shuffled: bool = False
    seed: int | None = None
    widths: np.ndarray | None = None

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        total = float(self.weights.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"generated weights sum to {total!r}, expected 1")
        if np.any(self.weights <= 0):
            raise ValidationError("generated weights must all be positive")
        if self.spec.equal_ratios and self.weights.size != self.spec.n ** self.depth:
            raise ValidationError(
                "equal-ratio cascade at depth "
                f"{self.depth} must have {self.spec.n ** self.depth} boxes"
            )

    @property
    def box_widths(self) -> np.ndarray:
        if self.widths is not None:
            return self.widths
        return np.full(self.weights.size, self.spec.n ** float(-self.depth))

    def to_csv(self, path) -> None:
        from .io import write_csv

        if self.widths is None:
            write_csv(path, ["weight"], [(f"{w:.17g}",) for w in self.weights])
        else:
            rows = [(f"{w:.17g}", f"{d:.17g}") for w, d in zip(self.weights, self.widths)]
            write_csv(path, ["weight", "width"], rows)


def generate_cascade(spec: CascadeSpec, depth: int, seed: int | None = None) -> GeneratedMeasure:
    """Realize ``spec`` down to ``depth`` levels of multiplicative splitting.

    With ``seed`` the (weight, ratio) pairs are permuted independently at
    every node, which randomizes the realization while preserving the
    analytic exponents.  Boxes are returned in left-to-right interval
    order.
    """
    depth = check_positive_int(depth, "depth")
    if not spec.tiles_interval:
        raise ValidationError(
            "generation requires ratios summing to 1 so the maps tile the interval, "
            f"got {sum(spec.ratios)!r}"
        )
    if spec.n ** depth > MAX_BOXES:
        raise ResourceError(
            f"{spec.n}**{depth} boxes exceeds the cap of 2**26; lower the depth"
        )

    m = np.asarray(spec.weights)
    r = np.asarray(spec.ratios)
    track_widths = not spec.equal_ratios
    rng = np.random.default_rng(seed) if seed is not None else None

    weights = np.ones(1)
    widths = np.ones(1) if track_widths else None
    for _ in range(depth):
        if rng is None:
            weights = (weights[:, None] * m[None, :]).ravel()
            if track_widths:
                widths = (widths[:, None] * r[None, :]).ravel()
        else:
            # one independent permutation per node
            idx = rng.permuted(
                np.tile(np.arange(spec.n), (weights.size, 1)), axis=1
            )
            weights = (weights[:, None] * m[idx]).reshape(-1)
            if track_widths:
                widths = (widths[:, None] * r[idx]).reshape(-1)

    return GeneratedMeasure(
        weights=weights,
        depth=depth,
        spec=spec,
        shuffled=seed is not None,
        seed=seed,
        widths=widths,
    )


def _log_moment(log_m: np.ndarray, q: float) -> float:
    """log(sum m_i**q) via max normalization."""
    a = q * log_m
    peak = a.max()
    return float(peak + np.log(np.exp(a - peak).sum()))


def _solve_exponent(spec: CascadeSpec, q: float) -> float:
    """Root of g(t) = sum m_i**q r_i**(-t) - 1, solved as log(sum) = 0.

    g is strictly increasing in t because every -log(r_i) is positive, so
    the root is unique.  Newton starts at q - 1 (exact for uniform
    measures) and falls back to bisection on a geometrically widened
    bracket whenever a step leaves [-100, 100].
    """
    if not math.isfinite(q):
        raise ValidationError(f"moment order must be finite, got {q!r}")
    log_m = np.log(spec.weights)
    log_r = np.log(spec.ratios)

    if spec.equal_ratios:
        return _log_moment(log_m, q) / log_r[0]

    def h_and_slope(t: float) -> tuple[float, float]:
        a = q * log_m - t * log_r
        peak = a.max()
        e = np.exp(a - peak)
        s = e.sum()
        h = peak + math.log(s)
        slope = float((e * -log_r).sum() / s)  # d/dt log(sum), always > 0
        return h, slope

    t = q - 1.0
    for _ in range(MAX_NEWTON_ITER):
        h, slope = h_and_slope(t)
        if abs(math.expm1(h)) <= ROOT_TOL:
            return t
        step = h / slope
        t_next = t - step
        if not (-100.0 <= t_next <= 100.0):
            break
        t = t_next
    else:
        raise ConvergenceError(
            f"exponent solve did not converge at order {q}: residual {math.expm1(h)!r}"
        )

    # bisection fallback: widen until the root is bracketed
    lo, hi = -100.0, 100.0
    while h_and_slope(lo)[0] > 0:
        lo *= 2.0
        if lo < -1e8:
            raise ConvergenceError(f"could not bracket exponent root at order {q}")
    while h_and_slope(hi)[0] < 0:
        hi *= 2.0
        if hi > 1e8:
            raise ConvergenceError(f"could not bracket exponent root at order {q}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        h, _ = h_and_slope(mid)
        if abs(math.expm1(h)) <= ROOT_TOL:
            return mid
        if h < 0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(
        f"exponent solve did not converge at order {q}: residual {math.expm1(h)!r}"
    )


def analytic_tau(spec: CascadeSpec, q: float) -> float:
    """Exact direct scaling exponent of the cascade at moment order ``q``."""
    return _solve_exponent(spec, q)


def analytic_theta(spec: CascadeSpec, p: float) -> float:
    """Exact exponent of the inverse measure at moment order ``p``.

    Requires the ratios to sum to 1, since they become the probabilities
    of the swapped spec.
    """
    return _solve_exponent(spec.swapped(), p)


def analytic_curve(spec: CascadeSpec, orders, kind: str = "direct") -> np.ndarray:
    """Vector of analytic tau (kind='direct') or theta (kind='inverse') values."""
    solver = analytic_tau if kind == "direct" else analytic_theta
    return np.array([solver(spec, float(o)) for o in np.asarray(orders, dtype=float)])
