"""Covert outage probability over binomially placed wardens.

For the worst-case policy every warden tunes its own threshold. The
worst-case detection probability depends on the network only through one
dimensionless number, the ratio of the interference scale to the mean
received signal power (``A**2 * B`` when alpha = 4). It is tabulated once
per path-loss exponent and interpolated, which keeps the disk integral and
the power inversion cheap.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .detection import (
    DetectionContext,
    avg_detection_exact4,
    avg_detection_general,
    optimal_threshold4,
    optimal_threshold_general,
    worst_case_threshold,
)
from .errors import (
    CovertnessInfeasibleError,
    DomainError,
    UnattainableThresholdError,
)
from .interference import InterferenceField
from .model import AntennaLayout, NetworkConfig, PolarPoint, System, constants_for
from .numerics import Bracket, Tolerance, bisect, integrate

THETA_POINTS = 128


class WorstCase:
    """Each warden picks the threshold maximising its own detection probability."""

    def __repr__(self):
        return "WorstCase()"

    def __eq__(self, other):
        return isinstance(other, WorstCase)

    def __hash__(self):
        return hash("WorstCase")


@dataclass(frozen=True)
class Fixed:
    """All wardens use the same threshold ``xi``."""

    xi: float

    def __post_init__(self):
        if not self.xi > 0:
            raise DomainError("fixed threshold must be positive")


ThresholdPolicy = Union[WorstCase, Fixed]
WORST_CASE = WorstCase()


@dataclass(frozen=True)
class OutageQuery:
    cfg: NetworkConfig
    layout: AntennaLayout
    policy: ThresholdPolicy = WORST_CASE

    def with_power(self, total: float) -> "OutageQuery":
        return OutageQuery(self.cfg, self.layout.with_total_power(total), self.policy)


# ---------------------------------------------------------------------------
# detection probability as a function of the invariant ratio

def _logit(p):
    p = np.clip(p, 1e-300, 1.0 - 1e-16)
    return np.log(p) - np.log1p(-p)


def _expit(z):
    return 1.0 / (1.0 + np.exp(-z))


class DetectionCurve:
    """Detection probability (and threshold) tabulated against ``log c``.

    ``c = scale / mean_signal`` where ``scale`` is ``A**2`` for the exact
    alpha=4 law and ``(kappa lambda_J P_J**delta)**(1/delta)`` otherwise. The
    spline is built in logit space; outside the table the caller-supplied
    tails take over.
    """

    def __init__(
        self,
        alpha: float,
        evaluate: Callable[[float], tuple[float, float]],
        log_c_range: tuple[float, float],
        step: float = 0.25,
        tail_exponents: tuple[float, float] | None = None,
    ):
        self.alpha = alpha
        self._evaluate = evaluate
        self.lo, self.hi = log_c_range
        xs = np.arange(self.lo, self.hi + 0.5 * step, step)
        vals = np.array([evaluate(math.exp(x)) for x in xs])
        self._p = CubicSpline(xs, _logit(vals[:, 0]))
        self._t = CubicSpline(xs, np.log(vals[:, 1]))
        self._ends = vals[0], vals[-1]
        self._tails = tail_exponents

    def _tail(self, log_c: np.ndarray, which: int):
        """Power-law continuation beyond the table, or direct evaluation."""
        if self._tails is None:
            vals = np.array([self._evaluate(math.exp(x)) for x in log_c])
            return vals[:, 0], vals[:, 1]
        (p_lo, t_lo), (p_hi, t_hi) = self._ends
        if which == 0:
            # 1 - p ~ c**k and t ~ c**(-2k) as c -> 0.
            k = self._tails[0]
            ratio = np.exp(log_c - self.lo)
            return 1.0 - (1.0 - p_lo) * ratio ** k, t_lo * ratio ** (-2.0 * k)
        # p ~ 1/c and t -> its limit as c -> infinity.
        ratio = np.exp(log_c - self.hi)
        return p_hi * ratio ** (-self._tails[1]), np.full_like(log_c, t_hi)

    def evaluate(self, c) -> tuple[np.ndarray, np.ndarray]:
        """``(p, t)`` at invariant ``c``; the threshold is ``scale * t``."""
        log_c = np.log(np.asarray(c, dtype=float))
        p = np.empty_like(log_c)
        t = np.empty_like(log_c)
        mid = (log_c >= self.lo) & (log_c <= self.hi)
        p[mid] = _expit(self._p(log_c[mid]))
        t[mid] = np.exp(self._t(log_c[mid]))
        for which, mask in ((0, log_c < self.lo), (1, log_c > self.hi)):
            if np.any(mask):
                p[mask], t[mask] = self._tail(log_c[mask], which)
        return p, t

    def p_max(self, c):
        return self.evaluate(c)[0]


def _unit_field(alpha: float, approx_terms: int) -> InterferenceField:
    """Field whose invariant scale is 1."""
    if alpha == 4:
        return InterferenceField.make(4.0 / math.pi ** 2, 1.0, 4.0, approx_terms)
    kappa = constants_for(alpha, approx_terms).kappa
    return InterferenceField.make(1.0 / kappa, 1.0, alpha, approx_terms)


def invariant_scale(field: InterferenceField) -> float:
    if field.alpha == 4:
        return field.a_const ** 2
    return field.strength ** (1.0 / field.constants.delta)


@functools.lru_cache(maxsize=None)
def worst_case_curve(alpha: float = 4.0, approx_terms: int = 5) -> DetectionCurve:
    """Tabulated worst-case detection probability for the given exponent."""
    field = _unit_field(alpha, approx_terms)

    if alpha == 4:
        def evaluate(c):
            sol = optimal_threshold4(DetectionContext(field, 1.0 / c))
            return sol.p_max, sol.xi_opt

        return DetectionCurve(alpha, evaluate, (-30.0, 12.0), tail_exponents=(1.0 / 3.0, 1.0))

    def evaluate(c):
        sol = optimal_threshold_general(DetectionContext(field, 1.0 / c), approx_terms)
        return sol.p_max, sol.xi_opt

    return DetectionCurve(alpha, evaluate, (-20.0, 10.0), step=0.5)


@functools.lru_cache(maxsize=64)
def fixed_threshold_curve(alpha: float, approx_terms: int, t: float) -> DetectionCurve:
    """Detection probability at the scaled threshold ``t`` as a function of ``c``."""
    field = _unit_field(alpha, approx_terms)

    def evaluate(c):
        ctx = DetectionContext(field, 1.0 / c)
        if alpha == 4:
            return avg_detection_exact4(ctx, t), t
        return avg_detection_general(ctx, t, approx_terms), t

    return DetectionCurve(alpha, evaluate, (-25.0, 25.0))


# ---------------------------------------------------------------------------
# disk integral

def _mean_power_xy(layout: AntennaLayout, alpha: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    total = np.zeros_like(x)
    for (ax, ay), p in zip(layout.xy(), layout.powers):
        d2 = np.maximum((x - ax) ** 2 + (y - ay) ** 2, 1e-300)
        total += p * d2 ** (-alpha / 2.0)
    return total


def detection_map(q: OutageQuery, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Average detection probability of a warden at each ``(x, y)`` under ``q.policy``."""
    cfg = q.cfg
    field = InterferenceField.from_config(cfg)
    mean = _mean_power_xy(q.layout, cfg.alpha, np.asarray(x, float), np.asarray(y, float))
    if field.lambda_j == 0.0:
        if isinstance(q.policy, Fixed):
            return np.exp(-q.policy.xi / mean)
        # Without interference the supremum over thresholds is perfect detection.
        return np.ones_like(mean)
    scale = invariant_scale(field)
    c = scale / mean
    if isinstance(q.policy, Fixed):
        curve = fixed_threshold_curve(cfg.alpha, cfg.approx_terms, q.policy.xi / scale)
    else:
        curve = worst_case_curve(cfg.alpha, 5 if cfg.alpha == 4 else cfg.approx_terms)
    return curve.p_max(c)


def _direct_detection(q: OutageQuery, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    for i, (xx, yy) in enumerate(zip(x, y)):
        ctx = DetectionContext.for_warden(q.cfg, q.layout, PolarPoint.from_xy(xx, yy))
        if isinstance(q.policy, Fixed):
            if q.cfg.alpha == 4:
                out[i] = avg_detection_exact4(ctx, q.policy.xi)
            else:
                out[i] = avg_detection_general(ctx, q.policy.xi, q.cfg.approx_terms)
        else:
            out[i] = worst_case_threshold(ctx, q.cfg.approx_terms).p_max
    return out


def warden_miss_probability(q: OutageQuery, direct: bool = False, theta_points: int = THETA_POINTS) -> float:
    """Probability that a single uniformly placed warden fails to detect.

    Polar disk integral: adaptive Gauss-Kronrod in ``r`` nested in a periodic
    trapezoid rule in ``theta``. ``direct=True`` solves each warden's
    threshold problem from scratch instead of using the tabulated curve.
    """
    d = q.cfg.d_radius
    # Half-step offset keeps the rays clear of antennas on the usual grids.
    thetas = 2.0 * math.pi * (np.arange(theta_points) + 0.5) / theta_points
    tol = Tolerance(abs_tol=1e-9 * d * d, rel_tol=1e-8, max_iter=400)
    pmap = _direct_detection if direct else detection_map
    rings = []
    for th in thetas:
        ct, st = math.cos(th), math.sin(th)

        def integrand(r, ct=ct, st=st):
            r = np.asarray(r, dtype=float)
            return (1.0 - pmap(q, r * ct, r * st)) * r

        rings.append(integrate(integrand, 0.0, d, tol))
    return 2.0 / (d * d) * math.fsum(rings) / theta_points


def covert_outage(q: OutageQuery, direct: bool = False) -> float:
    """Probability that at least one of the ``N`` wardens detects Alice."""
    n = q.cfg.n_wardens
    if n == 0:
        return 0.0
    miss = min(max(warden_miss_probability(q, direct), 0.0), 1.0)
    return min(max(1.0 - miss ** n, 0.0), 1.0)


def outage_vs_m_cas(q: OutageQuery, ms=(1, 2, 4, 8)) -> tuple[float, float]:
    """Outage for co-located layouts of several sizes at fixed total power.

    Returns ``(common value, max pairwise deviation)``.
    """
    pos = q.layout.positions[0]
    total = q.layout.total_power
    values = [
        covert_outage(OutageQuery(q.cfg, AntennaLayout.cas(m, pos, total), q.policy)) for m in ms
    ]
    return values[0], max(values) - min(values)


def max_power(q: OutageQuery, epsilon: float, tol: Tolerance = Tolerance(abs_tol=1e-300, rel_tol=1e-10)) -> float:
    """Largest total transmit power whose outage does not exceed ``epsilon``.

    Outage grows with power, so the level set is found by doubling from 1 W
    (at most 60 times either way) and bisecting inside the final octave.
    """
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if epsilon >= 1.0 or q.cfg.n_wardens == 0:
        raise UnattainableThresholdError(f"outage never reaches epsilon={epsilon}")
    if q.cfg.lambda_j == 0.0 and isinstance(q.policy, WorstCase):
        raise UnattainableThresholdError("without interference any power is detected")

    def excess(p):
        return covert_outage(q.with_power(p)) - epsilon

    p = 1.0
    f = excess(p)
    if f < 0:
        for _ in range(60):
            if excess(2.0 * p) >= 0:
                lo, hi = p, 2.0 * p
                break
            p *= 2.0
        else:
            raise UnattainableThresholdError(f"outage stays below {epsilon} up to {p:.3g} W")
    else:
        for _ in range(60):
            if excess(0.5 * p) < 0:
                lo, hi = 0.5 * p, p
                break
            p *= 0.5
        else:
            raise CovertnessInfeasibleError(f"outage exceeds {epsilon} even at {p:.3g} W", p)
    width_tol = Tolerance(abs_tol=max(tol.abs_tol, tol.rel_tol * lo), rel_tol=tol.rel_tol, max_iter=200)
    return bisect(excess, Bracket(lo, hi), width_tol)
