"""Pulse delineation and the seven morphology feature series.

Row order of the feature matrix: PWA, PPI, dPWA, dPPI, SPD, DPD, PA.
Time-based rows are in seconds; PWA/dPWA in signal units; PA in
signal-units x samples (discrete sum between consecutive troughs,
both trough samples included).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal as sp_signal

from .errors import InsufficientPulsesError, NoPulsesError

FEATURE_NAMES = ("pwa", "ppi", "dpwa", "dppi", "spd", "dpd", "pa")
NUM_FEATURES = len(FEATURE_NAMES)
RESAMPLE_POINTS = 60
DEFAULT_MIN_SEPARATION = 30


@dataclass(frozen=True)
class PulseLandmarks:
    """Trough (t_bp) and peak (t_tp) sample indices for N pulses.

    The sequence alternates trough, peak, trough, ..., trough: each pulse n
    spans t_bp[n] -> t_tp[n] -> t_bp[n+1], so len(t_bp) == N + 1.
    """

    t_bp: np.ndarray
    t_tp: np.ndarray

    def __post_init__(self):
        t_bp = np.asarray(self.t_bp, dtype=np.int64)
        t_tp = np.asarray(self.t_tp, dtype=np.int64)
        object.__setattr__(self, "t_bp", t_bp)
        object.__setattr__(self, "t_tp", t_tp)
        if len(t_bp) != len(t_tp) + 1:
            raise ValueError(
                f"{len(t_bp)} troughs for {len(t_tp)} peaks (need N + 1)"
            )
        if np.any(np.diff(t_bp) <= 0) or (len(t_tp) > 1 and np.any(np.diff(t_tp) <= 0)):
            raise ValueError("landmark indices must be strictly increasing")
        if np.any(t_tp <= t_bp[:-1]) or np.any(t_tp >= t_bp[1:]):
            raise ValueError("peaks must alternate strictly between troughs")

    @property
    def n_pulses(self) -> int:
        return len(self.t_tp)


def _strict_extrema(x: np.ndarray, order: int, find_max: bool) -> np.ndarray:
    comparator = np.greater if find_max else np.less
    (idx,) = sp_signal.argrelextrema(x, comparator, order=order, mode="clip")
    return idx


def delineate(samples, min_separation: int = DEFAULT_MIN_SEPARATION) -> PulseLandmarks:
    """Locate alternating trough/peak landmarks.

    Candidates are local maxima (minima) strictly more extreme than every
    neighbor within +-min_separation. Runs of consecutive same-type
    candidates are collapsed to the most extreme one (ties: lowest index);
    leading/trailing extrema are trimmed until the sequence starts and ends
    with a trough.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size <= 2 * min_separation:
        raise ValueError(f"signal too short ({x.size} <= {2 * min_separation})")
    maxima = _strict_extrema(x, min_separation, find_max=True)
    minima = _strict_extrema(x, min_separation, find_max=False)
    if len(minima) < 2:
        raise NoPulsesError(f"only {len(minima)} trough candidates")

    # merged stream of (index, is_max) sorted by index
    idx_all = np.concatenate([maxima, minima])
    kind_all = np.concatenate(
        [np.ones(len(maxima), dtype=bool), np.zeros(len(minima), dtype=bool)]
    )
    order = np.argsort(idx_all, kind="stable")
    idx_all, kind_all = idx_all[order], kind_all[order]

    kept_idx: list[int] = []
    kept_kind: list[bool] = []
    for i, is_max in zip(idx_all, kind_all):
        if kept_kind and kept_kind[-1] == is_max:
            prev = kept_idx[-1]
            better = x[i] > x[prev] if is_max else x[i] < x[prev]
            if better:
                kept_idx[-1] = int(i)
        else:
            kept_idx.append(int(i))
            kept_kind.append(bool(is_max))

    # trim to trough ... trough
    while kept_kind and kept_kind[0]:
        kept_idx.pop(0)
        kept_kind.pop(0)
    while kept_kind and kept_kind[-1]:
        kept_idx.pop()
        kept_kind.pop()

    t_bp = [i for i, m in zip(kept_idx, kept_kind) if not m]
    t_tp = [i for i, m in zip(kept_idx, kept_kind) if m]
    if len(t_bp) < 2:
        raise NoPulsesError(f"only {len(t_bp)} troughs after alternation repair")
    return PulseLandmarks(t_bp=np.asarray(t_bp), t_tp=np.asarray(t_tp))


def compute_features(samples, fs: float, landmarks: PulseLandmarks) -> dict[str, np.ndarray]:
    """Seven variable-length feature series from one delineated window.

    Lengths: pwa/spd/dpd/pa N, ppi/dpwa N-1, dppi N-2.
    """
    x = np.asarray(samples, dtype=np.float64)
    n = landmarks.n_pulses
    if n < 3:
        raise InsufficientPulsesError(f"need >= 3 pulses, got {n}")
    t_bp = landmarks.t_bp
    t_tp = landmarks.t_tp

    pwa = x[t_tp] - x[t_bp[:-1]]
    ppi = np.diff(t_tp) / fs
    dpwa = np.diff(pwa)
    dppi = np.diff(ppi)
    spd = (t_tp - t_bp[:-1]) / fs
    dpd = (t_bp[1:] - t_tp) / fs
    csum = np.concatenate([[0.0], np.cumsum(x)])
    # inclusive sum of x over [t_bp[k], t_bp[k+1]]
    pa = csum[t_bp[1:] + 1] - csum[t_bp[:-1]]

    return {
        "pwa": pwa,
        "ppi": ppi,
        "dpwa": dpwa,
        "dppi": dppi,
        "spd": spd,
        "dpd": dpd,
        "pa": pa,
    }


def resample_60(series, n_points: int = RESAMPLE_POINTS) -> np.ndarray:
    """Fourier-domain resampling to a fixed length (DC-preserving; linear
    trends show bounded ringing at the endpoints)."""
    x = np.asarray(series, dtype=np.float64)
    if x.size < 2:
        raise ValueError(f"series length {x.size} < 2")
    if x.size == n_points:
        return x.copy()
    return sp_signal.resample(x, n_points)


def window_feature_matrix(samples, fs, landmarks) -> np.ndarray:
    """7 x 60 matrix: each feature series resampled independently."""
    series = compute_features(samples, fs, landmarks)
    return np.vstack([resample_60(series[name]) for name in FEATURE_NAMES])


@dataclass(frozen=True)
class Standardizer:
    """Per-feature-row z-score statistics, fit on training windows only."""

    mean: np.ndarray
    std: np.ndarray
    zero_std_rows: np.ndarray = field(repr=False)

    STD_FLOOR = 1e-12


def fit_standardizer(matrices) -> Standardizer:
    mats = [np.asarray(m, dtype=np.float64) for m in matrices]
    if len(mats) < 2:
        raise ValueError(f"need >= 2 training matrices, got {len(mats)}")
    stacked = np.concatenate([m.reshape(NUM_FEATURES, -1) for m in mats], axis=1)
    mean = stacked.mean(axis=1)
    std = stacked.std(axis=1)
    return Standardizer(
        mean=mean, std=std, zero_std_rows=std < Standardizer.STD_FLOOR
    )


def apply_standardizer(matrix, standardizer: Standardizer) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.float64)
    safe_std = np.where(standardizer.zero_std_rows, 1.0, standardizer.std)
    out = (m - standardizer.mean[:, None]) / safe_std[:, None]
    out[standardizer.zero_std_rows] = 0.0
    return out
