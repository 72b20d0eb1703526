"""Connectivity probability of the Alice-to-Bob link.

CAS has a closed form through the Upsilon coefficients. DAS needs an
integral over the M-simplex; writing each simplex point as ``rho * u`` with
``u`` on the face ``sum(u) = 1`` lets the radial integral be done exactly as
a lower incomplete gamma function, so only the (M-1)-dimensional face is
sampled, with scrambled Sobol points.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special
from scipy.stats import qmc

from .errors import DomainError, SingularityError
from .interference import InterferenceField
from .model import AntennaLayout, NetworkConfig

M_MAX = 12


@functools.lru_cache(maxsize=None)
def upsilon(m: int, n: int, delta: float) -> float:
    """Combinatorial coefficient of the ``n``-th power term in the ``m``-th derivative."""
    if not 1 <= n <= m:
        raise DomainError(f"upsilon needs 1 <= n <= m, got m={m}, n={n}")
    if m > M_MAX:
        raise DomainError(f"m above {M_MAX} is not supported")
    if n == m:
        return 1.0
    total = 0.0
    for subset in itertools.combinations(range(1, m), m - n):
        prod = 1.0
        for i, l in enumerate(subset, start=1):
            prod *= l - delta * (l - i + 1)
        total += prod
    return total


def upsilon_table(m_max: int, delta: float) -> dict[tuple[int, int], float]:
    return {(m, n): upsilon(m, n, delta) for m in range(1, m_max + 1) for n in range(1, m + 1)}


def k_const(delta: float, m: int) -> float:
    """First-order coefficient ``K`` of the high-reliability CAS approximation."""
    total = 0.0
    for j in range(1, m):
        prod = 1.0
        for l in range(1, j):
            prod *= l - delta
        total += prod / math.factorial(j)
    return delta * total


@dataclass(frozen=True)
class CasLink:
    phi: float
    m_antennas: int
    delta: float

    def __post_init__(self):
        if self.phi < 0:
            raise DomainError("phi must be non-negative")
        if self.m_antennas < 1:
            raise DomainError("need at least one antenna")

    @classmethod
    def from_config(cls, cfg: NetworkConfig, layout: AntennaLayout) -> "CasLink":
        field = InterferenceField.from_config(cfg)
        r_ao = layout.positions[0].r
        phi = field.strength * r_ao ** 2 / layout.total_power ** field.constants.delta
        return cls(phi, layout.m, field.constants.delta)


def conn_prob_cas(link: CasLink, beta: float) -> float:
    if not beta > 0:
        raise DomainError("SINR threshold must be positive")
    x = link.phi * beta ** link.delta
    dx = link.delta * x
    series = 1.0
    for m in range(1, link.m_antennas):
        inner = sum(dx ** n * upsilon(m, n, link.delta) for n in range(1, m + 1))
        series += inner / math.factorial(m)
    return min(max(math.exp(-x) * series, 0.0), 1.0)


def conn_prob_cas_approx(link: CasLink, beta: float) -> float:
    if not beta > 0:
        raise DomainError("SINR threshold must be positive")
    x = link.phi * beta ** link.delta
    return (1.0 + k_const(link.delta, link.m_antennas) * x) * math.exp(-x)


# ---------------------------------------------------------------------------
# DAS

class IntegralEstimate(NamedTuple):
    """Randomised-QMC estimate; ``half_width`` is three batch standard errors."""

    value: float
    half_width: float


@dataclass(frozen=True)
class DasLink:
    layout: AntennaLayout
    field: InterferenceField
    seed: int = 20190101
    batches: int = 16

    def __post_init__(self):
        if any(p.r == 0.0 for p in self.layout.positions):
            raise SingularityError("an antenna sits on the receiver")

    @classmethod
    def from_config(cls, cfg: NetworkConfig, layout: AntennaLayout, **kw) -> "DasLink":
        return cls(layout, InterferenceField.from_config(cfg), **kw)

    @property
    def delta(self) -> float:
        return self.field.constants.delta

    @property
    def gains(self) -> np.ndarray:
        """``r_m**alpha / P_m`` for each antenna."""
        r = np.array([p.r for p in self.layout.positions])
        return r ** self.field.alpha / np.array(self.layout.powers)

    def face_points(self, samples: int) -> np.ndarray:
        """``(batches, n, M)`` uniform points on the simplex face, one scramble per batch."""
        return _face_points(self.layout.m, samples, self.seed, self.batches)

    def w_const(self, samples: int = 200_000) -> IntegralEstimate:
        return das_w_const(self, samples)


@functools.lru_cache(maxsize=32)
def _face_points(m: int, samples: int, seed: int, batches: int) -> np.ndarray:
    per = max(samples // batches, 1)
    # Sobol balance needs a power of two.
    per = 1 << max(int(round(math.log2(per))), 0)
    out = np.empty((batches, per, m))
    for b in range(batches):
        sob = qmc.Sobol(d=m, scramble=True, seed=np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(b,))))
        u = sob.random(per)
        e = -np.log1p(-u)  # exponential spacings
        out[b] = e / e.sum(axis=1, keepdims=True)
    out.setflags(write=False)
    return out


def _psi(link: DasLink, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    g = link.gains
    psi1 = (u * u) @ g
    psi2 = np.prod(2.0 * g * u, axis=-1)
    return psi1, psi2


def _batch_estimate(values: np.ndarray, scale: float) -> IntegralEstimate:
    means = values.mean(axis=1) * scale
    b = means.size
    se = means.std(ddof=1) / math.sqrt(b) if b > 1 else 0.0
    return IntegralEstimate(float(means.mean()), 3.0 * float(se))


def _check_samples(samples: int):
    if samples < 1000:
        raise DomainError("use at least 1000 samples")


def _radial_integral(link: DasLink, beta: float, samples: int, upper: bool) -> IntegralEstimate:
    if not beta > 0:
        raise DomainError("SINR threshold must be positive")
    _check_samples(samples)
    m, delta = link.layout.m, link.delta
    u = link.face_points(samples)
    psi1, psi2 = _psi(link, u)
    a = link.field.strength * psi1 ** delta * beta ** delta
    gam = special.gammaincc if upper else special.gammainc
    radial = np.zeros_like(a)
    for n in range(1, m + 1):
        # regularised incomplete gamma: gamma(n, a) = Gamma(n) * P(n, a)
        radial += delta ** n * upsilon(m, n, delta) * math.gamma(n) * gam(n, a)
    values = psi2 / psi1 ** m * radial / (2.0 * delta)
    if not np.all(np.isfinite(values)):
        raise SingularityError("non-finite DAS integrand")
    return _batch_estimate(values, 1.0 / math.factorial(m - 1))


def das_outage_integral(link: DasLink, beta: float, samples: int = 200_000) -> IntegralEstimate:
    """Estimate of ``1 - C`` for the DAS at SINR threshold ``beta``."""
    return _radial_integral(link, beta, samples, upper=False)


def conn_prob_das(link: DasLink, beta: float, samples: int = 200_000) -> IntegralEstimate:
    """DAS connectivity probability with a randomised-QMC error band.

    The full radial integral equals one, so when the outage dominates the
    complementary (upper incomplete gamma) integral gives ``C`` directly
    instead of as a small difference of two near-unit numbers.
    """
    loss = das_outage_integral(link, beta, samples)
    est = loss if loss.value <= 0.5 else _radial_integral(link, beta, samples, upper=True)
    value = 1.0 - est.value if est is loss else est.value
    return IntegralEstimate(min(max(value, 0.0), 1.0), est.half_width)


def das_w_const(link: DasLink, samples: int = 200_000) -> IntegralEstimate:
    """Slope ``W`` of the high-reliability DAS approximation ``C ~ 1 - W beta**delta``."""
    _check_samples(samples)
    m, delta = link.layout.m, link.delta
    u = link.face_points(samples)
    psi1, psi2 = _psi(link, u)
    values = psi1 ** (delta - m) * psi2
    prefactor = delta * link.field.strength * upsilon(m, 1, delta) / (2.0 * delta)
    return _batch_estimate(values, prefactor / math.factorial(m - 1))


def conn_prob_das_approx(w: float, beta: float, delta: float) -> float:
    return 1.0 - w * beta ** delta
