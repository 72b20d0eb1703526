"""Simulation oracle: sample geometry and fading, count events.

Trials are processed in fixed blocks of ``BLOCK`` trials. Block ``b`` draws
from ``substream(master_seed, b)``, so an estimate depends only on the seed
and the trial count, never on how many worker threads ran the blocks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .covertness import WORST_CASE, Fixed, ThresholdPolicy, invariant_scale, worst_case_curve
from .errors import DegenerateDrawError, DomainError
from .interference import InterferenceField
from .model import AntennaLayout, NetworkConfig, PolarPoint, System, substream

BLOCK = 1024
DEFAULT_SEED = 20190101


def default_seed() -> int:
    return int(os.environ.get("COVERTGEO_SEED", DEFAULT_SEED))


def worker_threads() -> int:
    env = os.environ.get("COVERTGEO_THREADS")
    if env:
        return max(int(env), 1)
    return os.cpu_count() or 1


@dataclass(frozen=True)
class TrialConfig:
    trials: int = 100_000
    master_seed: int = field(default_factory=default_seed)
    window_half_side: float = 50.0
    warden_draws: int | None = None
    shared_field: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("need at least one trial")
        if not self.window_half_side > 0:
            raise DomainError("simulation window must have positive size")
        if self.warden_draws is not None and self.warden_draws < 1:
            raise DomainError("need at least one warden draw")

    @property
    def draws(self) -> int:
        """Number of trials used for outage estimates."""
        return self.warden_draws if self.warden_draws is not None else self.trials

    def with_(self, **changes) -> "TrialConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    std_error: float
    trials: int

    @classmethod
    def from_events(cls, events: np.ndarray) -> "MonteCarloEstimate":
        n = events.size
        p = float(np.mean(events))
        se = math.sqrt(p * (1.0 - p) / (n - 1)) if n > 1 else 0.0
        return cls(p, se, n)

    def z_score(self, reference: float, extra_error: float = 0.0) -> float:
        """Distance to ``reference`` in units of the combined standard error."""
        sigma = math.hypot(self.std_error, extra_error)
        diff = abs(self.value - reference)
        if sigma == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / sigma


@dataclass(frozen=True)
class ChannelDraw:
    """Small-scale fading of one trial."""

    h_bob: np.ndarray
    h_warden: np.ndarray
    h_interferers: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric complex Gaussian with unit total variance."""
    z = rng.standard_normal(tuple(np.atleast_1d(shape)) + (2,)) * math.sqrt(0.5)
    return z[..., 0] + 1j * z[..., 1]


def draw_channel(rng: np.random.Generator, m: int, n_interferers: int = 0) -> ChannelDraw:
    return ChannelDraw(complex_normal(rng, m), complex_normal(rng, m), complex_normal(rng, n_interferers))


# ---------------------------------------------------------------------------
# transmit weights and received power

def beam_amplitudes(layout: AntennaLayout, h_bob: np.ndarray) -> np.ndarray:
    """Complex per-antenna amplitudes ``sqrt(P) * g`` for channels ``(..., M)``.

    CAS uses maximal ratio transmission with the total power, DAS co-phases
    each antenna at its own power.
    """
    h_bob = np.asarray(h_bob, dtype=complex)
    if layout.system is System.CAS:
        norm = np.linalg.norm(h_bob, axis=-1, keepdims=True)
        if np.any(norm == 0.0):
            raise DegenerateDrawError("Bob's channel vector is zero")
        return math.sqrt(layout.total_power) * np.conj(h_bob) / norm
    mag = np.abs(h_bob)
    if np.any(mag == 0.0):
        raise DegenerateDrawError("a channel coefficient to Bob is zero")
    return np.sqrt(np.array(layout.powers)) * np.conj(h_bob) / mag


def _signal(amps: np.ndarray, h_x: np.ndarray, d2: np.ndarray, alpha: float) -> np.ndarray:
    """``|sum_m amps_m h_m d_m**(-alpha/2)|**2`` along the last axis."""
    return np.abs(np.sum(amps * h_x * d2 ** (-alpha / 4.0), axis=-1)) ** 2


def received_signal_power(
    layout: AntennaLayout,
    channel: ChannelDraw,
    receiver: PolarPoint,
    target_channel: np.ndarray,
    alpha: float = 4.0,
) -> float:
    """Power of Alice's beam at ``receiver`` whose channel is ``channel.h_warden``.

    Weights are matched to ``target_channel`` (Bob's). Pass Bob's channel as
    both to get Bob's signal.
    """
    amps = beam_amplitudes(layout, target_channel)
    ant = layout.xy()
    rx, ry = receiver.xy
    d2 = (ant[:, 0] - rx) ** 2 + (ant[:, 1] - ry) ** 2
    if np.any(d2 == 0.0):
        raise DomainError("receiver coincides with a transmit antenna")
    return float(_signal(amps, np.asarray(channel.h_warden, dtype=complex), d2, alpha))


# ---------------------------------------------------------------------------
# block engine

def _run_blocks(trials: int, seed: int, fn: Callable[[np.random.Generator, int], np.ndarray]) -> np.ndarray:
    sizes = [BLOCK] * (trials // BLOCK)
    if trials % BLOCK:
        sizes.append(trials % BLOCK)
    tasks = list(enumerate(sizes))

    def run(task):
        b, size = task
        return fn(substream(seed, b), size)

    threads = min(worker_threads(), len(tasks))
    if threads <= 1:
        parts = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, tasks))
    return np.concatenate(parts, axis=0)


def _path_loss(d2: np.ndarray, alpha: float) -> np.ndarray:
    d2 = np.maximum(d2, 1e-300)
    if alpha == 4:
        return 1.0 / (d2 * d2)
    return d2 ** (-alpha / 2.0)


POINTS_PER_CHUNK = 4_000_000


def _interference(rng, size: int, cfg: NetworkConfig, half_side: float, rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    """Shot noise at ``(size, R)`` receivers; each trial has its own PPP.

    All receivers of one trial share the interferer positions but see
    independent Rayleigh fading. Dense fields are processed in trial chunks
    to bound memory.
    """
    out = np.zeros(rx.shape)
    if cfg.lambda_j == 0.0:
        return out
    mean_count = 4.0 * cfg.lambda_j * half_side * half_side
    chunk = max(int(POINTS_PER_CHUNK / mean_count), 1)
    for lo in range(0, size, chunk):
        hi = min(lo + chunk, size)
        out[lo:hi] = _interference_chunk(rng, hi - lo, cfg, half_side, mean_count, rx[lo:hi], ry[lo:hi])
    return out


def _interference_chunk(rng, size, cfg, half_side, mean_count, rx, ry):
    out = np.zeros(rx.shape)
    counts = rng.poisson(mean_count, size)
    total = int(counts.sum())
    owner = np.repeat(np.arange(size), counts)
    px = rng.uniform(-half_side, half_side, total)
    py = rng.uniform(-half_side, half_side, total)
    for j in range(rx.shape[1]):
        gain = rng.standard_exponential(total)
        dx = px - rx[owner, j]
        dy = py - ry[owner, j]
        out[:, j] = cfg.p_j * np.bincount(owner, gain * _path_loss(dx * dx + dy * dy, cfg.alpha), minlength=size)
    return out


def _fixed_receiver(size: int, point: PolarPoint) -> tuple[np.ndarray, np.ndarray]:
    x, y = point.xy
    return np.full((size, 1), x), np.full((size, 1), y)


def _antenna_d2(layout: AntennaLayout, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Squared distances from receivers ``(...,)`` to every antenna, shape ``(..., M)``."""
    ant = layout.xy()
    return (x[..., None] - ant[:, 0]) ** 2 + (y[..., None] - ant[:, 1]) ** 2


def _warden_samples(cfg: NetworkConfig, layout: AntennaLayout, warden: PolarPoint, tc: TrialConfig) -> np.ndarray:
    """Columns ``(S_w, I_w)`` for a warden at a fixed position."""
    d2 = _antenna_d2(layout, *[np.array(v) for v in warden.xy])
    if np.any(d2 == 0.0):
        raise DomainError("warden coincides with a transmit antenna")

    def block(rng, size):
        h_o = complex_normal(rng, (size, layout.m))
        h_w = complex_normal(rng, (size, layout.m))
        s = _signal(beam_amplitudes(layout, h_o), h_w, d2, cfg.alpha)
        rx, ry = _fixed_receiver(size, warden)
        i = _interference(rng, size, cfg, tc.window_half_side, rx, ry)[:, 0]
        return np.column_stack((s, i))

    return _run_blocks(tc.trials, tc.master_seed, block)


def sample_interference(cfg: NetworkConfig, tc: TrialConfig, receiver: PolarPoint = PolarPoint(0.0)) -> np.ndarray:
    """Simulated aggregate interference at ``receiver``, one value per trial."""

    def block(rng, size):
        rx, ry = _fixed_receiver(size, receiver)
        return _interference(rng, size, cfg, tc.window_half_side, rx, ry)[:, 0]

    return _run_blocks(tc.trials, tc.master_seed, block)


def sample_warden_signal(cfg: NetworkConfig, layout: AntennaLayout, warden: PolarPoint, tc: TrialConfig) -> np.ndarray:
    """Simulated signal power Alice leaks to a warden (interference-free draw)."""
    d2 = _antenna_d2(layout, *[np.array(v) for v in warden.xy])
    if np.any(d2 == 0.0):
        raise DomainError("warden coincides with a transmit antenna")

    def block(rng, size):
        h_o = complex_normal(rng, (size, layout.m))
        h_w = complex_normal(rng, (size, layout.m))
        return _signal(beam_amplitudes(layout, h_o), h_w, d2, cfg.alpha)

    return _run_blocks(tc.trials, tc.master_seed, block)


def _events(flags: np.ndarray, scalar: bool):
    ests = [MonteCarloEstimate.from_events(flags[:, k]) for k in range(flags.shape[1])]
    return ests[0] if scalar else ests


def estimate_avg_detection(
    cfg: NetworkConfig,
    layout: AntennaLayout,
    warden: PolarPoint,
    xi: float | Sequence[float],
    tc: TrialConfig = TrialConfig(),
):
    """Fraction of trials with ``I_w <= xi < S_w + I_w``.

    A sequence of thresholds is evaluated on the same draws and returns a
    list of estimates.
    """
    scalar = np.ndim(xi) == 0
    xis = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xis <= 0):
        raise DomainError("threshold must be positive")
    si = _warden_samples(cfg, layout, warden, tc)
    s, i = si[:, :1], si[:, 1:]
    return _events((i <= xis) & (xis < s + i), scalar)


def estimate_connectivity(
    cfg: NetworkConfig,
    layout: AntennaLayout,
    beta: float | Sequence[float],
    tc: TrialConfig = TrialConfig(),
):
    """Fraction of trials where Bob's SIR reaches ``beta``."""
    scalar = np.ndim(beta) == 0
    betas = np.atleast_1d(np.asarray(beta, dtype=float))
    if np.any(betas <= 0):
        raise DomainError("SINR threshold must be positive")
    d2 = _antenna_d2(layout, np.array(0.0), np.array(0.0))
    if np.any(d2 == 0.0):
        raise DomainError("an antenna sits on Bob")

    def block(rng, size):
        h_o = complex_normal(rng, (size, layout.m))
        s = _signal(beam_amplitudes(layout, h_o), h_o, d2, cfg.alpha)
        rx, ry = _fixed_receiver(size, PolarPoint(0.0))
        i = _interference(rng, size, cfg, tc.window_half_side, rx, ry)[:, 0]
        with np.errstate(divide="ignore"):
            return s / i

    sir = _run_blocks(tc.trials, tc.master_seed, block)[:, None]
    return _events(sir >= betas, scalar)


def estimate_outage(
    cfg: NetworkConfig,
    layout: AntennaLayout,
    tc: TrialConfig = TrialConfig(),
    policy: ThresholdPolicy = WORST_CASE,
) -> MonteCarloEstimate:
    """Fraction of draws in which at least one warden decides correctly.

    Wardens are redrawn uniformly in the disk every trial. Under the
    worst-case policy each warden uses the threshold optimal for its own
    position.
    """
    n = cfg.n_wardens
    draws = tc.draws
    if n == 0:
        return MonteCarloEstimate(0.0, 0.0, draws)
    field_ = InterferenceField.from_config(cfg)
    curve = None
    if isinstance(policy, Fixed):
        pass
    elif cfg.lambda_j > 0:
        curve = worst_case_curve(cfg.alpha, 5 if cfg.alpha == 4 else cfg.approx_terms)
        scale = invariant_scale(field_)

    def block(rng, size):
        r = cfg.d_radius * np.sqrt(rng.random((size, n)))
        th = 2.0 * math.pi * rng.random((size, n))
        wx, wy = r * np.cos(th), r * np.sin(th)
        d2 = np.maximum(_antenna_d2(layout, wx, wy), 1e-300)
        h_o = complex_normal(rng, (size, layout.m))
        h_w = complex_normal(rng, (size, n, layout.m))
        amps = beam_amplitudes(layout, h_o)[:, None, :]
        s = _signal(amps, h_w, d2, cfg.alpha)
        if tc.shared_field:
            i = _interference(rng, size, cfg, tc.window_half_side, wx, wy)
        else:
            i = np.column_stack([
                _interference(rng, size, cfg, tc.window_half_side, wx[:, k:k + 1], wy[:, k:k + 1])[:, 0]
                for k in range(n)
            ])
        if isinstance(policy, Fixed):
            xi = np.full_like(s, policy.xi)
        elif curve is None:
            # No interference: an arbitrarily small threshold never errs.
            return np.ones(size, dtype=bool)
        else:
            mean = np.sum(np.array(layout.powers) * _path_loss(d2, cfg.alpha), axis=-1)
            xi = scale * curve.evaluate(scale / mean)[1]
        return np.any((i <= xi) & (xi < s + i), axis=1)

    flags = _run_blocks(draws, tc.master_seed, block)
    return MonteCarloEstimate.from_events(flags)
