"""Aggregate shot-noise interference from a Poisson field of interferers."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedExponentError
from .model import DerivedConstants, NetworkConfig, constants_for, derive_constants
from .numerics import erfc

log = logging.getLogger(__name__)

MAX_APPROX_TERMS = 30


@dataclass(frozen=True)
class InterferenceField:
    lambda_j: float
    p_j: float
    constants: DerivedConstants
    alpha: float = 4.0

    def __post_init__(self):
        if self.lambda_j < 0:
            raise DomainError("interferer density must be non-negative")
        if not self.p_j > 0:
            raise DomainError("interferer power must be positive")

    @classmethod
    def from_config(cls, cfg: NetworkConfig) -> "InterferenceField":
        return cls(cfg.lambda_j, cfg.p_j, derive_constants(cfg), cfg.alpha)

    @classmethod
    def make(cls, lambda_j: float, p_j: float = 1.0, alpha: float = 4.0, approx_terms: int = 5):
        return cls(lambda_j, p_j, constants_for(alpha, approx_terms), alpha)

    @property
    def strength(self) -> float:
        """``kappa * lambda_J * P_J**delta``, the exponent scale of the Laplace transform."""
        c = self.constants
        return c.kappa * self.lambda_j * self.p_j ** c.delta

    @property
    def a_const(self) -> float:
        """Scale ``A`` of the exact alpha=4 law, ``pi^2 lambda_J sqrt(P_J) / 4``."""
        return math.pi ** 2 * self.lambda_j * math.sqrt(self.p_j) / 4.0

    def require_alpha4(self):
        if self.alpha != 4:
            raise UnsupportedExponentError(f"closed form needs alpha = 4, field has {self.alpha}")


def laplace_interference(field: InterferenceField, s):
    """``E[exp(-s I)]`` for the shot noise at a typical receiver."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("Laplace argument must be non-negative")
    out = np.exp(-field.strength * s_arr ** field.constants.delta)
    return float(out) if out.ndim == 0 else out


def _approx_coefficients(L: int) -> np.ndarray:
    if not 1 <= L <= MAX_APPROX_TERMS:
        raise DomainError(f"approximation order must lie in [1, {MAX_APPROX_TERMS}], got {L}")
    l = np.arange(1, L + 1)
    log_binom = math.lgamma(L + 1) - np.array([math.lgamma(k + 1) + math.lgamma(L - k + 1) for k in l])
    return np.where(l % 2 == 1, 1.0, -1.0) * np.exp(log_binom)


def cdf_interference_series(field: InterferenceField, x, L: int):
    """Unclamped L-term alternating sum approximating ``P{I <= x}``."""
    x_arr = np.asarray(x, dtype=float)
    coeffs = _approx_coefficients(L)
    tau = L * math.exp(-math.lgamma(L + 1) / L)
    delta = field.constants.delta
    l = np.arange(1, L + 1)
    with np.errstate(divide="ignore", over="ignore"):
        expo = -field.strength * (np.multiply.outer(1.0 / x_arr, l * tau)) ** delta
    return np.exp(expo) @ coeffs


def cdf_interference_approx(field: InterferenceField, x, L: int = 5):
    """Approximate CDF of the interference, clamped to [0, 1].

    The alternating sum can leave [0, 1] by a hair for tiny ``x``; clamped
    values are reported through the module logger.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("CDF argument must be positive")
    raw = cdf_interference_series(field, x_arr, L)
    out = np.clip(raw, 0.0, 1.0)
    if np.any(out != raw):
        log.debug("interference CDF approximation clamped at %d point(s)", int(np.sum(out != raw)))
    return float(out) if out.ndim == 0 else out


def cdf_interference_exact4(field: InterferenceField, x):
    """Exact interference CDF for alpha = 4: ``1 - erf(A / sqrt(x))``."""
    field.require_alpha4()
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("CDF argument must be positive")
    out = erfc(field.a_const / np.sqrt(x_arr))
    return float(out) if np.ndim(out) == 0 else out


def pdf_interference_exact4(field: InterferenceField, x):
    """Exact interference density for alpha = 4 (a Levy law)."""
    field.require_alpha4()
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("PDF argument must be positive")
    a = field.a_const
    with np.errstate(over="ignore"):
        out = a / math.sqrt(math.pi) * x_arr ** -1.5 * np.exp(-a * a / x_arr)
    return float(out) if out.ndim == 0 else out
