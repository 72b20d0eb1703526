"""Special functions, adaptive quadrature and one-dimensional search.

Every analytic module in the package funnels its numerics through here so
that tolerances are set in one place.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .errors import AccuracyError, BracketError, DomainError, NoRootError

__all__ = [
    "Tolerance",
    "Bracket",
    "DEFAULT_TOL",
    "erf",
    "erfc",
    "gamma",
    "integrate",
    "integrate_with_error",
    "bisect",
    "expand_bracket",
    "golden_section_max",
]


@dataclass(frozen=True)
class Tolerance:
    """Convergence controls for quadrature and iterative searches."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("tolerances must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


# ---------------------------------------------------------------------------
# special functions

def erf(x):
    """Error function; accepts scalars or arrays."""
    out = special.erf(x)
    return float(out) if np.ndim(out) == 0 else out


def erfc(x):
    """Complementary error function, accurate in the far tail."""
    out = special.erfc(x)
    return float(out) if np.ndim(out) == 0 else out


def gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"gamma is defined here only for x > 0, got {x}")
    return math.gamma(x)


# ---------------------------------------------------------------------------
# quadrature

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
_XK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]


def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            raise ValueError
    except (TypeError, ValueError):
        y = np.array([float(f(float(t))) for t in x])
    if not np.all(np.isfinite(y)):
        raise DomainError("integrand produced a non-finite value")
    return y


def _gk15(f: Callable, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    y = _evaluate(f, 0.5 * (a + b) + half * _XK)
    kronrod = half * float(_WK @ y)
    gauss = half * float(_WG @ y)
    return kronrod, abs(kronrod - gauss)


def integrate_with_error(
    f: Callable,
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[float, float]:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature.

    ``f`` is called with arrays of nodes when it supports them and falls back
    to scalar calls otherwise. An infinite upper limit is mapped onto [0, 1)
    by ``x = a + t / (1 - t)``.

    Returns:
        ``(estimate, error_bound)``.

    Raises:
        AccuracyError: the tolerance was not met within ``tol.max_iter``
            subdivisions; the best estimate is attached.
    """
    if not a <= b:
        raise DomainError(f"integration limits must satisfy a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0, 0.0
    if math.isinf(b):
        if math.isinf(a):
            raise DomainError("lower limit must be finite")
        g = f

        def f(t):  # noqa: F811 - deliberate rebinding to the mapped integrand
            t = np.asarray(t, dtype=float)
            s = 1.0 - t
            return np.asarray(g(a + t / s), dtype=float) / (s * s)

        a, b = 0.0, 1.0

    value, err = _gk15(f, a, b)
    heap = [(-err, a, b, value)]
    total, total_err = value, err
    for _ in range(tol.max_iter):
        if total_err <= max(tol.abs_tol, tol.rel_tol * abs(total)):
            return total, total_err
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, (neg_err, lo, hi, val))
            break
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        # Resum rather than update incrementally to avoid drift.
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)
    if total_err <= max(tol.abs_tol, tol.rel_tol * abs(total)):
        return total, total_err
    raise AccuracyError(
        f"quadrature error {total_err:.3g} above tolerance after {tol.max_iter} subdivisions",
        total,
        total_err,
    )


def integrate(f: Callable, a: float, b: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Definite integral of ``f`` over ``[a, b]``; see :func:`integrate_with_error`."""
    return integrate_with_error(f, a, b, tol)[0]


# ---------------------------------------------------------------------------
# root finding and maximisation

def bisect(f: Callable[[float], float], bracket: Bracket, tol: Tolerance = DEFAULT_TOL) -> float:
    """Root of ``f`` inside a sign-changing bracket, to interval width ``abs_tol``."""
    lo, hi = float(bracket.lo), float(bracket.hi)
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f = {f_lo:.3g}, {f_hi:.3g}")
    for _ in range(tol.max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol.abs_tol or not lo < mid < hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def expand_bracket(
    f: Callable[[float], float],
    x0: float,
    max_doublings: int = 60,
    direction: str = "both",
) -> Bracket:
    """Find a sign change of ``f`` on (0, inf) by geometric probing from ``x0``.

    Probes ``x0 * 2**k`` starting with ``[x0/2, 2*x0]`` and returns the
    narrowest adjacent pair of probes with strictly opposite signs.
    ``direction`` restricts the search to ``"up"`` or ``"down"`` when the
    caller knows on which side of ``x0`` the root lies.
    """
    if not x0 > 0:
        raise DomainError(f"x0 must be positive, got {x0}")
    if direction not in ("both", "up", "down"):
        raise DomainError(f"unknown direction {direction!r}")

    def opposite(u: float, v: float) -> bool:
        return (u > 0 and v < 0) or (u < 0 and v > 0)

    f0 = f(x0)
    up_x, up_f = x0, f0
    down_x, down_f = x0, f0
    for _ in range(max_doublings):
        if direction in ("both", "up"):
            x, fx = 2.0 * up_x, f(2.0 * up_x)
            if opposite(up_f, fx):
                return Bracket(up_x, x)
            up_x, up_f = x, fx
        if direction in ("both", "down"):
            x, fx = 0.5 * down_x, f(0.5 * down_x)
            if opposite(fx, down_f):
                return Bracket(x, down_x)
            down_x, down_f = x, fx
    raise NoRootError(f"no sign change within 2**{max_doublings} of x0={x0}")


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float],
    bracket: Bracket,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``bracket``.

    Stops once the bracket is narrower than ``max(abs_tol, rel_tol * |x|)``.
    The bracket end points are compared at the end so a monotone ``f``
    returns its boundary maximum.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    f_lo, f_hi = f(lo), f(hi)
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(tol.max_iter):
        if hi - lo <= max(tol.abs_tol, tol.rel_tol * abs(0.5 * (lo + hi))):
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
    x_best, f_best = (x1, f1) if f1 >= f2 else (x2, f2)
    if f_lo > f_best:
        x_best, f_best = bracket.lo, f_lo
    if f_hi > f_best:
        x_best, f_best = bracket.hi, f_hi
    return x_best, f_best
