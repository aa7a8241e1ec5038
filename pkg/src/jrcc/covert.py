"""Warden radiometer test, covert rate, and the covertness constraint.

The warden averages ``n`` complex samples, ``T = (1/n) sum |y_i|^2``. Under
H0 the samples are noise of power ``s2``; under H1 they also carry the
received signal power ``p``. With the Gaussian approximation

    T | H0 ~ N(s2, s2^2 / n),    T | H1 ~ N(s2 + p, (s2 + p)^2 / n)

and the total error is ``P_FA + P_MD`` (1 for a blind test), minimized over
the threshold in ``[s2, s2 + p]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .channel import ChannelSet, ModuleAllocation, PhaseConfig


@dataclass(frozen=True)
class DetectionOutcome:
    optimal_threshold: float
    false_alarm: float
    missed_detection: float
    total_error: float


def warden_received_power(channels: ChannelSet, phases: PhaseConfig, alloc: ModuleAllocation,
                          user_power: float, warden: int) -> float:
    """Signal power at ``warden``: direct path plus every assigned element's reflection."""
    if not 0 <= warden < channels.num_wardens:
        raise IndexError(f"warden {warden} out of range for {channels.num_wardens} wardens")
    assigned = alloc.owners(channels.num_elements) >= 0
    refl = phases.coefficients[assigned] * channels.cascade_warden[assigned, warden]
    h = channels.direct_warden[warden] + refl.sum()
    return float(user_power * abs(h) ** 2)


def _error_terms(theta, rho, n):
    # Noise-normalized: H0 mean 1, H1 mean 1 + rho.
    sq = np.sqrt(n)
    fa = ndtr(-(theta - 1.0) * sq)
    md = ndtr((theta - 1.0 - rho) * sq / (1.0 + rho))
    return fa, md


def _threshold_candidates(rho: float, n: int) -> list[float]:
    """Interval endpoints plus the stationary points of P_FA + P_MD inside it.

    Stationary points are where the two Gaussian densities cross, the roots of
    (1 + 1/s) t^2 - 2 t - 2 ln(s) / (n (1 - 1/s)) = 0 with s = 1 + rho.
    """
    cands = [1.0, 1.0 + rho]
    s = 1.0 + rho
    a = 1.0 + 1.0 / s
    c = -2.0 * np.log(s) / (n * (1.0 - 1.0 / s))
    disc = 1.0 - a * c
    if disc >= 0:
        for t in ((1.0 + np.sqrt(disc)) / a, (1.0 - np.sqrt(disc)) / a):
            if 1.0 < t < 1.0 + rho:
                cands.append(float(t))
    return cands


def detection_error(warden_power: float, noise_power: float, samples: int = 100) -> DetectionOutcome:
    """Warden's minimum total error probability under the Gaussian radiometer model."""
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if warden_power <= 0:
        return DetectionOutcome(float(noise_power), 0.5, 0.5, 1.0)
    rho = warden_power / noise_power
    best = None
    for t in _threshold_candidates(rho, samples):
        fa, md = _error_terms(t, rho, samples)
        if best is None or fa + md < best[1] + best[2]:
            best = (t, float(fa), float(md))
    t, fa, md = best
    return DetectionOutcome(t * noise_power, fa, md, min(fa + md, 1.0))


def total_error(warden_power, noise_power, samples: int = 100) -> np.ndarray:
    """Vectorized ``detection_error(...).total_error``."""
    p = np.atleast_1d(np.asarray(warden_power, dtype=float))
    s2 = np.broadcast_to(np.asarray(noise_power, dtype=float), p.shape)
    out = np.array([detection_error(pi, si, samples).total_error for pi, si in zip(p.ravel(), s2.ravel())])
    return out.reshape(p.shape)


def max_covert_ratio(samples: int, threshold: float, tol: float = 1e-12) -> float:
    """Largest warden SNR ``p / s2`` whose minimum total error still meets ``threshold``."""
    lo, hi = 0.0, 1.0
    while detection_error(hi, 1.0, samples).total_error >= threshold:
        hi *= 2.0
    while hi - lo > tol * max(hi, 1e-300):
        mid = 0.5 * (lo + hi)
        if detection_error(mid, 1.0, samples).total_error >= threshold:
            lo = mid
        else:
            hi = mid
    return lo


def detection_error_mc(warden_power: float, noise_power: float, samples: int = 100,
                       trials: int = 100_000, seed: int = 0, grid_points: int = 400) -> float:
    """Empirical minimum total error from exact chi-square radiometer statistics."""
    if trials < 10_000:
        raise ValueError("need at least 1e4 trials")
    rng = np.random.default_rng(seed)
    scale = 1.0 / (2 * samples)
    t0 = noise_power * scale * rng.chisquare(2 * samples, trials)
    t1 = (noise_power + warden_power) * scale * rng.chisquare(2 * samples, trials)
    if warden_power <= 0:
        grid = np.array([noise_power])
    else:
        grid = np.linspace(noise_power, noise_power + warden_power, max(grid_points, 200))
    t0.sort()
    t1.sort()
    fa = 1.0 - np.searchsorted(t0, grid, side="right") / trials
    md = np.searchsorted(t1, grid, side="left") / trials
    return float(np.min(fa + md))


def covert_rate(power: float, bandwidth: float, channel_magnitude: float,
                noise_power: float) -> float:
    """Shannon rate ``B log2(1 + P |h|^2 / s2)`` in bit/s."""
    if bandwidth < 0:
        raise ValueError(f"bandwidth must be non-negative, got {bandwidth}")
    if noise_power <= 0:
        raise ValueError(f"noise power must be positive, got {noise_power}")
    return float(bandwidth * np.log2(1.0 + power * channel_magnitude ** 2 / noise_power))


def covertness_satisfied(outcome: DetectionOutcome, threshold: float) -> bool:
    return outcome.total_error >= threshold
