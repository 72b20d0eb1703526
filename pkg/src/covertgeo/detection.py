"""A warden's radiometer and its average and worst-case detection probability.

The signal a warden collects from Alice is exponentially distributed for
both antenna systems, so one context type covers CAS and DAS: only the mean
received power differs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoInteriorMaximumError, SingularityError
from .interference import InterferenceField, cdf_interference_series, pdf_interference_exact4
from .model import AntennaLayout, NetworkConfig, PolarPoint, distance
from .numerics import (
    DEFAULT_TOL,
    Bracket,
    Tolerance,
    bisect,
    erfc,
    expand_bracket,
    golden_section_max,
    integrate,
)

# Kernel mass beyond this many signal means is below e**-40 and is skipped.
_KERNEL_SPAN = 40.0


@dataclass(frozen=True)
class DetectionContext:
    """Everything one warden's detector depends on.

    ``mean_signal`` is the mean of the exponential signal power Willie sees;
    ``b_const`` is its reciprocal.
    """

    field: InterferenceField
    mean_signal: float

    def __post_init__(self):
        if not self.mean_signal > 0 or not math.isfinite(self.mean_signal):
            raise DomainError(f"mean signal power must be positive and finite, got {self.mean_signal}")

    @property
    def a_const(self) -> float:
        return self.field.a_const

    @property
    def b_const(self) -> float:
        return 1.0 / self.mean_signal

    @classmethod
    def from_ab(cls, a_const: float, b_const: float, p_j: float = 1.0) -> "DetectionContext":
        """alpha=4 context with prescribed ``A`` and ``B``."""
        lambda_j = 4.0 * a_const / (math.pi ** 2 * math.sqrt(p_j))
        return cls(InterferenceField.make(lambda_j, p_j, 4.0), 1.0 / b_const)

    @classmethod
    def for_warden(cls, cfg: NetworkConfig, layout: AntennaLayout, warden: PolarPoint) -> "DetectionContext":
        field = InterferenceField.from_config(cfg)
        return cls(field, received_mean_power(layout, warden, cfg.alpha))


def received_mean_power(layout: AntennaLayout, point: PolarPoint, alpha: float) -> float:
    """Mean signal power at ``point``: ``sum_m P_m r_m**-alpha``."""
    total = 0.0
    for pos, p in zip(layout.positions, layout.powers):
        d = distance(pos, point)
        if d == 0.0:
            raise SingularityError("receiver coincides with a transmit antenna")
        total += p * d ** -alpha
    return total


def das_b_const(layout: AntennaLayout, warden: PolarPoint) -> float:
    """``B`` of the alpha=4 detector for a DAS: ``1 / sum_m P_m r_m**-4``."""
    return 1.0 / received_mean_power(layout, warden, 4.0)


def instant_detection(s_w: float, i_w: float, xi: float) -> float:
    """Radiometer outcome for one realisation: 1.0 on a correct decision, else 0.5."""
    return 1.0 if i_w <= xi < s_w + i_w else 0.5


def _kernel_start(b: float, xi: float) -> float:
    return max(0.0, xi - _KERNEL_SPAN / b)


def avg_detection_general(ctx: DetectionContext, xi: float, L: int = 5, tol: Tolerance = DEFAULT_TOL) -> float:
    """Average detection probability with the L-term interference CDF.

    Uses ``F(xi) - int_0^xi F(y) B exp(-B (xi - y)) dy`` with ``F`` the
    unclamped alternating-sum approximation.
    """
    if not xi > 0:
        raise DomainError("threshold must be positive")
    b = ctx.b_const
    field = ctx.field

    def integrand(y):
        y = np.asarray(y, dtype=float)
        return cdf_interference_series(field, y, L) * b * np.exp(-b * (xi - y))

    lo = _kernel_start(b, xi)
    conv = integrate(integrand, lo, xi, tol) if lo < xi else 0.0
    value = float(cdf_interference_series(field, xi, L)) - conv
    return min(max(value, 0.0), 1.0)


def avg_detection_exact4(ctx: DetectionContext, xi: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Exact average detection probability for alpha = 4.

    Evaluates ``exp(-B xi) Y(xi) - erf(A/sqrt(xi))`` after folding the erf
    term into the integral, which keeps every term non-negative:
    ``exp(-B xi) erfc(A/sqrt(xi)) + int_0^xi [erfc(A/sqrt(xi)) - erfc(A/sqrt(y))] B exp(-B(xi-y)) dy``.
    """
    ctx.field.require_alpha4()
    if not xi > 0:
        raise DomainError("threshold must be positive")
    a, b = ctx.a_const, ctx.b_const
    tail = erfc(a / math.sqrt(xi))
    if a == 0.0:
        return math.exp(-b * xi)

    def integrand(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            gap = tail - erfc(a / np.sqrt(y))
        return gap * b * np.exp(-b * (xi - y))

    lo = _kernel_start(b, xi)
    conv = integrate(integrand, lo, xi, tol)
    value = math.exp(-b * xi) * tail + conv
    return min(max(value, 0.0), 1.0)


def threshold_slope4(ctx: DetectionContext, xi: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Derivative of the alpha=4 detection probability in the threshold.

    Equals ``f_I(xi) - B * pbar(xi)``, the left side of the optimality
    equation; positive before the optimum and negative after.
    """
    return float(pdf_interference_exact4(ctx.field, xi)) - ctx.b_const * avg_detection_exact4(ctx, xi, tol)


@dataclass(frozen=True)
class ThresholdSolution:
    xi_opt: float
    p_max: float


def optimal_threshold4(ctx: DetectionContext, tol: Tolerance = DEFAULT_TOL) -> ThresholdSolution:
    """Willie's threshold maximising the alpha=4 detection probability.

    The slope is strictly positive for ``xi <= 2 A**2 / 3`` (the interference
    density is still rising there), so the search only expands upwards.
    """
    ctx.field.require_alpha4()
    a, b = ctx.a_const, ctx.b_const
    if a == 0.0:
        raise NoInteriorMaximumError("without interference the detection probability peaks at xi -> 0")
    a2 = a * a
    x0 = 2.0 * a2 / 3.0

    def slope(xi):
        return threshold_slope4(ctx, xi, tol)

    bracket = expand_bracket(slope, x0, direction="up")
    xi_tol = Tolerance(abs_tol=max(tol.abs_tol, 1e-13 * bracket.hi), rel_tol=tol.rel_tol, max_iter=tol.max_iter)
    xi_opt = bisect(slope, bracket, xi_tol)
    with np.errstate(over="ignore", under="ignore"):
        p_max = (a / b) * math.exp(-a2 / xi_opt) / math.sqrt(math.pi * xi_opt ** 3)
    return ThresholdSolution(xi_opt, min(max(p_max, 0.0), 1.0))


def _signal_scale(ctx: DetectionContext, L: int) -> float:
    """Characteristic interference level of the L-term law."""
    c = ctx.field.constants
    return (ctx.field.strength) ** (1.0 / c.delta) * (L * math.exp(-math.lgamma(L + 1) / L))


def optimal_threshold_general(
    ctx: DetectionContext,
    L: int = 5,
    grid_points: int = 1000,
    tol: Tolerance = Tolerance(abs_tol=1e-9, rel_tol=1e-7),
) -> ThresholdSolution:
    """Worst-case threshold for any path-loss exponent.

    Golden-section search in ``log(xi)`` on a bracket located by a coarse
    geometric scan. If the coarse scan is not unimodal the full
    ``grid_points`` scan is used and its best point is refined locally.
    """
    if ctx.field.lambda_j == 0.0:
        raise NoInteriorMaximumError("without interference the detection probability peaks at xi -> 0")
    scale_i = _signal_scale(ctx, L)
    lo_x = math.log(min(scale_i, ctx.mean_signal)) - 8.0
    hi_x = math.log(max(scale_i, ctx.mean_signal)) + 8.0

    def p_of_logxi(u):
        return avg_detection_general(ctx, math.exp(u), L)

    def scan(n):
        us = np.linspace(lo_x, hi_x, n)
        vals = np.array([p_of_logxi(u) for u in us])
        return us, vals

    us, vals = scan(61)
    if _count_peaks(vals) != 1:
        us, vals = scan(grid_points)
    k = int(np.argmax(vals))
    bracket = Bracket(us[max(k - 1, 0)], us[min(k + 1, len(us) - 1)])
    u_opt, p_opt = golden_section_max(p_of_logxi, bracket, Tolerance(abs_tol=tol.abs_tol, rel_tol=tol.rel_tol))
    return ThresholdSolution(math.exp(u_opt), p_opt)


def _count_peaks(values: np.ndarray) -> int:
    """Number of rise-to-fall sign changes in successive differences."""
    d = np.diff(values)
    d = d[d != 0.0]
    if d.size == 0:
        return 0
    signs = np.sign(d)
    changes = int(np.sum((signs[:-1] > 0) & (signs[1:] < 0)))
    return changes


def worst_case_threshold(ctx: DetectionContext, L: int = 5) -> ThresholdSolution:
    """Dispatch to the exact alpha=4 solution or the general-exponent search."""
    if ctx.field.alpha == 4:
        return optimal_threshold4(ctx)
    return optimal_threshold_general(ctx, L)
