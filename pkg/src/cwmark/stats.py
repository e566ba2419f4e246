"""Gaussian weight model and two-threshold design.

Thresholds come from the standard normal tail function Q: a pruning
attack at rate R removes the R smallest weight magnitudes, so the upper
threshold must sit above the corresponding Gaussian quantile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ThresholdDesignError
from .rng import splitmix64_stream, u64_to_unit

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def q_function(x: float) -> float:
    """Standard normal tail probability P(Z > x)."""
    return 0.5 * math.erfc(x / _SQRT2)


def q_inverse(p: float) -> float:
    """Inverse of q_function on (0, 1).

    Rational initial guess polished by Newton iterations with a bisection
    safeguard; converges to float precision, far tighter than the 1e-10
    residual the callers rely on.
    """
    if math.isnan(p) or not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -q_inverse(1.0 - p)

    # Abramowitz-Stegun 26.2.23 start, |error| < 4.5e-4.
    t = math.sqrt(-2.0 * math.log(p))
    x = t - (2.515517 + t * (0.802853 + t * 0.010328)) / (
        1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))
    )
    # Q(t + 2) < exp(-(t+2)^2/2) < p, so the root is bracketed.
    lo, hi = 0.0, t + 2.0
    for _ in range(100):
        err = q_function(x) - p
        if err > 0.0:
            lo = x
        else:
            hi = x
        pdf = _INV_SQRT_2PI * math.exp(-0.5 * x * x)
        nxt = x + err / pdf if pdf > 0.0 else 0.5 * (lo + hi)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 1e-16 * max(1.0, abs(x)):
            x = nxt
            break
        x = nxt
    return x


@dataclass(frozen=True)
class GaussianModel:
    """Zero-mean Gaussian weight model with standard deviation sigma."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def sample(self, n: int, seed: int) -> np.ndarray:
        return sample_gaussian_weights(n, self.sigma, seed)


@dataclass(frozen=True)
class ThresholdPair:
    """Classification thresholds 0 < t0 < t1.

    Also requires the two values to remain distinct after rounding to
    binary32, since embedded weights are stored at that precision and
    extraction exactness needs strict magnitude separation there.
    """

    t0: float
    t1: float

    def __post_init__(self):
        if not (math.isfinite(self.t0) and math.isfinite(self.t1)):
            raise ValueError("thresholds must be finite")
        if not 0.0 < self.t0 < self.t1:
            raise ValueError("thresholds must satisfy 0 < t0 < t1")
        if not np.float32(self.t0) < np.float32(self.t1):
            raise ValueError("t0 and t1 collapse to the same binary32 value")

    def __iter__(self):
        return iter((self.t0, self.t1))


def design_t1(sigma: float, rate: float, two_sided: bool = False) -> float:
    """Upper threshold for a target pruning rate.

    Default is t1 = sigma * Qinv(1 - rate), which treats pruning as a
    one-sided event. Pruning actually cuts on |w|, so the matching
    magnitude quantile is sigma * Qinv((1 - rate)/2); pass two_sided=True
    for that stricter value. Both are exposed rather than silently picking
    one; see the package docs for the trade-off.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not 0.0 <= rate < 1.0:
        raise ValueError("rate must lie in [0, 1)")
    tail = (1.0 - rate) / 2.0 if two_sided else 1.0 - rate
    if tail >= 0.5:
        raise ThresholdDesignError(
            f"rate {rate} gives a non-positive t1; pick a rate above 0.5 "
            "or set thresholds explicitly"
        )
    return sigma * q_inverse(tail)


def design_thresholds(
    sigma: float, rate: float, two_sided: bool = False, t0_fraction: float = 0.5
) -> ThresholdPair:
    """ThresholdPair with t1 from design_t1 and t0 = t0_fraction * t1."""
    if not 0.0 < t0_fraction < 1.0:
        raise ValueError("t0_fraction must lie in (0, 1)")
    t1 = design_t1(sigma, rate, two_sided=two_sided)
    return ThresholdPair(t0=t0_fraction * t1, t1=t1)


def estimate_sigma(weights) -> float:
    """Sample standard deviation about zero, sqrt(mean(w**2))."""
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0:
        raise ValueError("cannot estimate sigma from an empty vector")
    return float(np.sqrt(np.mean(np.square(w))))


def standard_normals(n: int, seed: int) -> np.ndarray:
    """n i.i.d. standard normal doubles, deterministic per seed.

    Reproducibility contract: uniforms come from the SplitMix64 stream via
    u64_to_unit, consumed in pairs (u1, u2) = (stream[2i], stream[2i+1]);
    the Box-Muller transform emits
        out[2i]   = sqrt(-2 ln u1) * cos(2 pi u2)
        out[2i+1] = sqrt(-2 ln u1) * sin(2 pi u2)
    and the sequence is truncated to n. The u64 stream is bit-exact across
    implementations; the float outputs are only comparable within normal
    transcendental-function tolerances.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pairs = (n + 1) // 2
    u = u64_to_unit(splitmix64_stream(seed, 2 * pairs))
    radius = np.sqrt(-2.0 * np.log(u[0::2]))
    angle = (2.0 * np.pi) * u[1::2]
    out = np.empty(2 * pairs, dtype=np.float64)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:n]


def sample_gaussian_weights(n: int, sigma: float, seed: int) -> np.ndarray:
    """n weights drawn i.i.d. from N(0, sigma**2), as binary32."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return (sigma * standard_normals(n, seed)).astype(np.float32)
