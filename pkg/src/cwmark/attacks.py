"""Attacks to exercise the watermark against: pruning, noise, targeted flips."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import splitmix64_stream
from .stats import estimate_sigma, standard_normals
from .watermark import as_weight_vector


@dataclass(frozen=True)
class PruneSpec:
    """What a magnitude-pruning pass actually did."""

    rate: float
    p: int
    cutoff: float
    zeroed: int


def prune(weights, rate: float) -> tuple[np.ndarray, PruneSpec]:
    """Zero the weights whose magnitude falls below the rate quantile.

    With n weights and p = floor(rate * n), the cutoff is the p-th
    smallest magnitude (0-indexed) and entries with magnitude strictly
    below it are zeroed. Ties at the cutoff survive, so the realized
    zero count can be below p.
    """
    w = as_weight_vector(weights)
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"prune rate must be in [0, 1), got {rate}")
    n = w.size
    p = min(int(math.floor(rate * n)), n - 1)
    mag = np.abs(w)
    cutoff = float(np.partition(mag, p)[p])
    mask = mag < cutoff
    out = w.copy()
    out[mask] = 0.0
    return out, PruneSpec(
        rate=rate, p=p, cutoff=cutoff, zeroed=int(np.count_nonzero(mask))
    )


def add_noise(weights, sigma_noise: float, seed: int) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise with the given standard deviation.

    Noise is drawn by the deterministic generator behind standard_normals,
    added in binary64, and rounded back to binary32.
    """
    w = as_weight_vector(weights)
    if sigma_noise < 0.0:
        raise ValueError(f"noise level must be nonnegative, got {sigma_noise}")
    if sigma_noise == 0.0:
        return w.copy()
    noise = standard_normals(w.size, seed) * sigma_noise
    return (w.astype(np.float64) + noise).astype(np.float32)


def targeted_flip_attack(
    weights, budget: int, seed: int, strategy: str = "suppress"
) -> tuple[np.ndarray, np.ndarray]:
    """Adversary without the key tries to corrupt the hidden codeword.

    "suppress" shrinks the `budget` largest magnitudes down to the first
    magnitude below them, hoping to knock 1-positions out of the top set.
    "inflate" grows `budget` small-magnitude entries (chosen by seed) to
    twice the RMS weight scale so they crowd into the top set. Returns
    the attacked vector and the sorted touched indices.
    """
    w = as_weight_vector(weights)
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if budget > w.size:
        raise ValueError(f"budget {budget} exceeds vector length {w.size}")
    if budget == 0:
        return w.copy(), np.empty(0, dtype=np.int64)
    mag = np.abs(w.astype(np.float64))
    out = w.copy()
    if strategy == "suppress":
        order = np.argsort(-mag, kind="stable")
        idx = order[:budget]
        boundary = mag[order[budget]] if budget < w.size else 0.0
        signs = np.where(w[idx] >= 0, 1.0, -1.0)
        out[idx] = (signs * boundary).astype(np.float32)
    elif strategy == "inflate":
        scale = estimate_sigma(w)
        if scale == 0.0:
            scale = 1.0
        candidates = np.flatnonzero(mag <= scale / 2.0)
        if candidates.size < budget:
            candidates = np.argsort(mag, kind="stable")[:budget]
        keys = splitmix64_stream(seed, candidates.size)
        chosen = candidates[np.argsort(keys, kind="stable")[:budget]]
        signs = np.where(w[chosen] >= 0, 1.0, -1.0)
        out[chosen] = (signs * 2.0 * scale).astype(np.float32)
        idx = chosen
    else:
        raise ValueError(f"unknown attack strategy {strategy!r}")
    return out, np.sort(idx)
