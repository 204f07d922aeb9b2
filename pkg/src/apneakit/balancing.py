"""Minority-class augmentation on raw segments and majority undersampling.

Each positive window spawns exactly one augmented copy (technique drawn
uniformly from five), doubling the positive count; the majority class is
then randomly subsampled to parity. Deterministic per seed: window i uses
rng seeded with (seed, i), so results are independent of processing order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

TECHNIQUES = ("jitter", "scale", "magnitude_warp", "time_warp", "permute")


@dataclass(frozen=True)
class AugmentConfig:
    jitter_sigma_frac: float = 0.03  # x window std
    scale_sigma: float = 0.1
    warp_sigma: float = 0.2
    warp_knots: int = 4
    permute_chunks: int = 4


def _smooth_curve(n: int, knots: int, sigma: float, rng) -> np.ndarray:
    """Random curve around 1.0: cubic spline through `knots` Gaussian knot
    values; degenerate knot counts fall back to constant / linear."""
    values = rng.normal(1.0, sigma, size=knots)
    if knots == 1:
        return np.full(n, values[0])
    positions = np.linspace(0.0, n - 1.0, knots)
    if knots < 4:
        return np.interp(np.arange(n), positions, values)
    return CubicSpline(positions, values)(np.arange(n))


def jitter(x, rng, config=AugmentConfig()):
    sigma = config.jitter_sigma_frac * np.std(x)
    return x + rng.normal(0.0, sigma, size=len(x))


def scale(x, rng, config=AugmentConfig()):
    return x * rng.normal(1.0, config.scale_sigma)


def magnitude_warp(x, rng, config=AugmentConfig()):
    return x * _smooth_curve(len(x), config.warp_knots, config.warp_sigma, rng)


def time_warp(x, rng, config=AugmentConfig()):
    n = len(x)
    steps = _smooth_curve(n, config.warp_knots, config.warp_sigma, rng)
    steps = np.clip(steps, 0.05, None)
    warped_t = np.concatenate([[0.0], np.cumsum(steps[:-1])])
    warped_t *= (n - 1) / warped_t[-1]
    return np.interp(np.linspace(0.0, n - 1.0, n), warped_t, x)


def permute(x, rng, config=AugmentConfig()):
    chunks = np.array_split(np.asarray(x), config.permute_chunks)
    order = rng.permutation(len(chunks))
    # guarantee the copy differs from the source (1 chunk stays identity)
    while len(chunks) > 1 and np.array_equal(order, np.arange(len(chunks))):
        order = rng.permutation(len(chunks))
    return np.concatenate([chunks[i] for i in order])


_TECHNIQUE_FNS = {
    "jitter": jitter,
    "scale": scale,
    "magnitude_warp": magnitude_warp,
    "time_warp": time_warp,
    "permute": permute,
}


def augment_window(x, seed: int, window_index: int, config=AugmentConfig()):
    """One augmented copy of a raw segment; technique chosen uniformly."""
    rng = np.random.default_rng([seed, window_index])
    name = TECHNIQUES[rng.integers(len(TECHNIQUES))]
    x = np.asarray(x, dtype=np.float64)
    return _TECHNIQUE_FNS[name](x, rng, config), name


def augment_minority(windows, labels, seed: int, config=AugmentConfig()):
    """Append one augmented copy per positive window. Returns (windows',
    labels') with the positive count exactly doubled."""
    labels = np.asarray(labels, dtype=np.int64)
    positives = np.flatnonzero(labels == 1)
    if positives.size == 0:
        raise ValueError("no positive windows to augment")
    out_windows = [np.asarray(w, dtype=np.float64) for w in windows]
    out_labels = list(labels)
    for i in positives:
        copy, _ = augment_window(windows[i], seed, int(i), config)
        out_windows.append(copy)
        out_labels.append(1)
    return out_windows, np.asarray(out_labels)


def undersample_majority(windows, labels, seed: int):
    """Uniform subset (without replacement) of the majority class down to the
    minority count; minority windows all retained, original order preserved."""
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == n_neg:
        return list(windows), labels.copy()
    majority, n_keep = (0, n_pos) if n_neg > n_pos else (1, n_neg)
    maj_idx = np.flatnonzero(labels == majority)
    rng = np.random.default_rng(seed)
    kept = set(rng.choice(maj_idx, size=n_keep, replace=False).tolist())
    selected = [
        i for i in range(len(labels)) if labels[i] != majority or i in kept
    ]
    return [windows[i] for i in selected], labels[selected]
