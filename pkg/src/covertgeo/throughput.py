"""Two-stage covert throughput maximisation.

Stage one fixes the largest transmit power meeting the covertness target;
stage two picks the SINR threshold (equivalently the rate ``ln(1 + beta)``)
that maximises ``C * R`` at that power.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .connectivity import (
    CasLink,
    DasLink,
    conn_prob_cas,
    conn_prob_das,
    das_w_const,
    k_const,
)
from .covertness import WORST_CASE, OutageQuery, ThresholdPolicy, covert_outage, max_power
from .errors import CovertnessInfeasibleError, DomainError
from .model import AntennaLayout, NetworkConfig, System
from .numerics import Bracket, Tolerance, bisect, expand_bracket, golden_section_max

BETA_RANGE = (1e-3, 1e3)
DAS_SAMPLES = 100_000
SCAN_POINTS = 25


class Method(str, enum.Enum):
    CLOSED_FORM_APPROX = "closed-form"
    EXHAUSTIVE_EXACT = "exact"


@dataclass(frozen=True)
class ThroughputSolution:
    p_star: float
    beta_star: float
    r_star: float
    c_at_opt: float
    o_at_opt: float
    t_star: float
    method: Method
    diagnostic: str = ""

    @property
    def feasible(self) -> bool:
        return not self.diagnostic

    def as_dict(self) -> dict:
        return {
            "p_star": self.p_star,
            "beta_star": self.beta_star,
            "r_star": self.r_star,
            "c_at_opt": self.c_at_opt,
            "o_at_opt": self.o_at_opt,
            "t_star": self.t_star,
            "method": self.method.value,
            "diagnostic": self.diagnostic,
        }


def t_o_cas(beta: float, phi_o: float, k: float, delta: float) -> float:
    """High-reliability CAS throughput ``(1 + K x) exp(-x) ln(1 + beta)``, ``x = phi_o beta**delta``."""
    x = phi_o * beta ** delta
    return (1.0 + k * x) * math.exp(-x) * math.log1p(beta)


def t_o_das(beta: float, w: float, delta: float) -> float:
    return (1.0 - w * beta ** delta) * math.log1p(beta)


def q_function(beta: float, phi_o: float, k: float, delta: float) -> float:
    """``exp(phi_o beta**delta)`` times the slope of :func:`t_o_cas`."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    x = phi_o * beta ** delta
    first = (1.0 + k * x) / (1.0 + beta)
    second = math.log1p(beta) * (1.0 + k * (x - 1.0)) * delta * phi_o * beta ** (delta - 1.0)
    return first - second


def das_slope(beta: float, w: float, delta: float) -> float:
    """Derivative of :func:`t_o_das` in ``beta``."""
    return (1.0 - w * beta ** delta) / (1.0 + beta) - w * delta * beta ** (delta - 1.0) * math.log1p(beta)


_ROOT_TOL = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=400)


def optimal_beta_cas(phi_o: float, k: float, delta: float) -> float:
    """Unique positive root of :func:`q_function`, found by bisection in ``log beta``."""
    if not phi_o > 0:
        raise DomainError("phi_o must be positive")

    def g(u):
        return q_function(math.exp(u), phi_o, k, delta)

    # expand_bracket works on (0, inf); shift log beta so the probe starts at 0.
    shift = 60.0
    b = expand_bracket(lambda v: g(v - shift), shift, direction="both")
    return math.exp(bisect(g, Bracket(b.lo - shift, b.hi - shift), _ROOT_TOL))


def optimal_beta_das(w: float, delta: float) -> float:
    """Zero of the DAS slope inside ``(0, W**(-1/delta))``."""
    if not w > 0:
        raise DomainError("W must be positive")
    hi = math.log(w ** (-1.0 / delta))
    lo = hi - 1.0
    while das_slope(math.exp(lo), w, delta) <= 0:
        lo -= 1.0
        if lo < hi - 700:
            raise DomainError(f"no positive throughput for W={w}")
    return math.exp(bisect(lambda u: das_slope(math.exp(u), w, delta), Bracket(lo, hi), _ROOT_TOL))


def connectivity_at(cfg: NetworkConfig, layout: AntennaLayout, beta: float, samples: int = DAS_SAMPLES) -> float:
    """Exact connectivity probability for either antenna system.

    A one-antenna DAS is a single transmitter, so it shares the closed form.
    """
    if layout.system is System.CAS or layout.m == 1:
        return conn_prob_cas(CasLink.from_config(cfg, layout), beta)
    return conn_prob_das(DasLink.from_config(cfg, layout), beta, samples).value


def _degenerate(method: Method, message: str) -> ThroughputSolution:
    return ThroughputSolution(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, method, message)


def solve_throughput(
    cfg: NetworkConfig,
    layout: AntennaLayout,
    epsilon: float | None = None,
    method: Method | str = Method.EXHAUSTIVE_EXACT,
    samples: int = DAS_SAMPLES,
    policy: ThresholdPolicy = WORST_CASE,
) -> ThroughputSolution:
    """Maximise covert throughput: largest covert power, then the best rate."""
    method = Method(method)
    eps = cfg.epsilon if epsilon is None else epsilon
    if eps < 0:
        raise DomainError("epsilon must be non-negative")
    if eps == 0:
        return _degenerate(method, "covertness threshold 0 admits no positive transmit power")
    q = OutageQuery(cfg, layout, policy)
    try:
        p_star = max_power(q, eps)
    except CovertnessInfeasibleError as exc:
        return _degenerate(method, f"covertness infeasible: {exc}")
    lay = layout.with_total_power(p_star)
    o_star = covert_outage(q.with_power(p_star))
    delta = 2.0 / cfg.alpha

    if method is Method.CLOSED_FORM_APPROX:
        if lay.system is System.CAS or lay.m == 1:
            link = CasLink.from_config(cfg, lay)
            beta = optimal_beta_cas(link.phi, k_const(delta, lay.m), delta)
        else:
            w = das_w_const(DasLink.from_config(cfg, lay), samples).value
            beta = optimal_beta_das(w, delta)
    else:
        def objective(u):
            b = math.exp(u)
            return connectivity_at(cfg, lay, b, samples) * math.log1p(b)

        # A coarse scan picks the basin, so a near-flat tail cannot pull the
        # golden-section search to the edge of the range.
        grid = np.linspace(math.log(BETA_RANGE[0]), math.log(BETA_RANGE[1]), SCAN_POINTS)
        k = int(np.argmax([objective(u) for u in grid]))
        bracket = Bracket(grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)])
        u_opt, _ = golden_section_max(objective, bracket, Tolerance(abs_tol=1e-4, rel_tol=1e-4))
        beta = math.exp(u_opt)

    c = connectivity_at(cfg, lay, beta, samples)
    r = math.log1p(beta)
    return ThroughputSolution(p_star, beta, r, c, o_star, c * r, method)
