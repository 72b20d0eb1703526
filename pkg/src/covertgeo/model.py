"""Network configuration, polar geometry and point-process samplers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DomainError
from .numerics import gamma

TWO_PI = 2.0 * math.pi


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class PolarPoint:
    """A point ``(r, theta)`` relative to the receiver Bob at the origin."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.r >= 0:
            raise DomainError(f"radius must be non-negative, got {self.r}")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @property
    def xy(self) -> tuple[float, float]:
        return self.r * math.cos(self.theta), self.r * math.sin(self.theta)

    @classmethod
    def from_xy(cls, x: float, y: float) -> "PolarPoint":
        return cls(math.hypot(x, y), math.atan2(y, x))


def distance(p: PolarPoint, q: PolarPoint) -> float:
    """Law-of-cosines distance between two polar points."""
    d2 = p.r * p.r + q.r * q.r - 2.0 * p.r * q.r * math.cos(p.theta - q.theta)
    return math.sqrt(max(d2, 0.0))


@dataclass(frozen=True)
class NetworkConfig:
    """Scalar network parameters. Powers are linear watts."""

    alpha: float = 4.0
    lambda_j: float = 0.1
    p_j: float = 1.0
    d_radius: float = 2.0
    n_wardens: int = 2
    epsilon: float = 0.3
    approx_terms: int = 5

    def __post_init__(self):
        if not self.alpha > 2:
            raise DomainError(f"path-loss exponent must exceed 2, got {self.alpha}")
        if self.lambda_j < 0:
            raise DomainError("interferer density must be non-negative")
        if not self.p_j > 0:
            raise DomainError("interferer power must be positive")
        if not self.d_radius > 0:
            raise DomainError("warden disk radius must be positive")
        if self.n_wardens < 0:
            raise DomainError("number of wardens must be non-negative")
        if not 0 <= self.epsilon <= 1:
            raise DomainError("epsilon must lie in [0, 1]")
        if self.approx_terms < 1:
            raise DomainError("approx_terms must be at least 1")

    def with_(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)


class System(str, enum.Enum):
    CAS = "cas"
    DAS = "das"


@dataclass(frozen=True)
class AntennaLayout:
    """Positions and per-antenna powers of Alice's transmit antennas."""

    system: System
    positions: tuple[PolarPoint, ...]
    powers: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "system", System(self.system))
        object.__setattr__(self, "positions", tuple(self.positions))
        object.__setattr__(self, "powers", tuple(float(p) for p in self.powers))
        if len(self.positions) < 1:
            raise DomainError("a layout needs at least one antenna")
        if len(self.positions) != len(self.powers):
            raise DomainError("positions and powers must have equal length")
        if any(not p > 0 for p in self.powers):
            raise DomainError("antenna powers must be positive")
        if self.system is System.CAS and len(set(self.positions)) != 1:
            raise DomainError("CAS antennas must share one position")

    @property
    def m(self) -> int:
        return len(self.positions)

    @property
    def total_power(self) -> float:
        return math.fsum(self.powers)

    def with_total_power(self, total: float) -> "AntennaLayout":
        """Same layout with every antenna power scaled to reach ``total``."""
        if not total > 0:
            raise DomainError("total power must be positive")
        scale = total / self.total_power
        return replace(self, powers=tuple(p * scale for p in self.powers))

    def xy(self) -> np.ndarray:
        return np.array([p.xy for p in self.positions])

    @classmethod
    def cas(cls, m: int, position: PolarPoint = PolarPoint(1.0, 0.0), total_power: float = 1.0):
        if m < 1:
            raise DomainError("m must be at least 1")
        return cls(System.CAS, (position,) * m, (total_power / m,) * m)

    @classmethod
    def das(cls, positions: Sequence[PolarPoint], powers: Sequence[float]):
        return cls(System.DAS, tuple(positions), tuple(powers))


def uniform_circle_layout(m: int, radius: float = 1.0, total_power: float = 1.0) -> AntennaLayout:
    """DAS layout with ``m`` equal-power antennas spread evenly on a circle."""
    if m < 1:
        raise DomainError("m must be at least 1")
    if not radius > 0 or not total_power > 0:
        raise DomainError("radius and total power must be positive")
    positions = tuple(PolarPoint(radius, TWO_PI * k / m) for k in range(m))
    return AntennaLayout(System.DAS, positions, (total_power / m,) * m)


def make_layout(system: System | str, m: int, total_power: float, radius: float = 1.0) -> AntennaLayout:
    """Layout used throughout the experiments: CAS at ``(radius, 0)`` or a DAS circle."""
    if System(system) is System.CAS:
        return AntennaLayout.cas(m, PolarPoint(radius, 0.0), total_power)
    return uniform_circle_layout(m, radius, total_power)


@dataclass(frozen=True)
class DerivedConstants:
    delta: float
    kappa: float
    tau: float


def derive_constants(cfg: NetworkConfig) -> DerivedConstants:
    if not cfg.alpha > 2:
        raise DomainError("path-loss exponent must exceed 2")
    if cfg.approx_terms < 1:
        raise DomainError("approx_terms must be at least 1")
    return constants_for(cfg.alpha, cfg.approx_terms)


def constants_for(alpha: float, approx_terms: int = 5) -> DerivedConstants:
    delta = 2.0 / alpha
    kappa = math.pi * gamma(1.0 + delta) * gamma(1.0 - delta)
    L = approx_terms
    tau = L * math.exp(-math.lgamma(L + 1) / L)
    return DerivedConstants(delta=delta, kappa=kappa, tau=tau)


# ---------------------------------------------------------------------------
# random streams and samplers

def substream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for ``index`` derived from ``master_seed``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ppp_square_xy(rng: np.random.Generator, lam: float, half_side: float) -> np.ndarray:
    """Cartesian coordinates of a PPP restricted to ``[-half_side, half_side]^2``."""
    if lam < 0 or not half_side > 0:
        raise DomainError("need lam >= 0 and half_side > 0")
    n = rng.poisson(4.0 * lam * half_side * half_side) if lam > 0 else 0
    return rng.uniform(-half_side, half_side, size=(n, 2))


def bpp_disk_xy(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """``n`` i.i.d. uniform points in the disk of the given radius."""
    if n < 0:
        raise DomainError("n must be non-negative")
    r = radius * np.sqrt(rng.random(n))
    theta = TWO_PI * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def _to_polar(xy: np.ndarray) -> list[PolarPoint]:
    return [PolarPoint.from_xy(x, y) for x, y in xy]


def sample_ppp_square(seed, lam: float, half_side: float = 50.0) -> list[PolarPoint]:
    return _to_polar(ppp_square_xy(_rng(seed), lam, half_side))


def sample_bpp_disk(seed, n: int, radius: float) -> list[PolarPoint]:
    return _to_polar(bpp_disk_xy(_rng(seed), n, radius))
