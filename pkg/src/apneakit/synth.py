"""Deterministic synthetic PPG + apnea-event generator.

Beats are two-Gaussian waveforms (distinct systolic peak and diastolic bump)
on a slowly drifting heart rate. Each planted apnea episode scales the beat
amplitude down by ``pwa_drop_frac``; episode end timestamps land in distinct
30 s buckets so window-label counts are exactly predictable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .pulse_features import PulseLandmarks
from .signal_io import ApneaEvent, EventKind, PpgRecord

SYSTOLIC_POS = 0.30
SYSTOLIC_WIDTH = 0.055
DIASTOLIC_POS = 0.62
DIASTOLIC_WIDTH = 0.12
DIASTOLIC_GAIN = 0.45
DRIFT_FRAC = 0.02
DRIFT_PERIOD_BEATS = 40.0
EPISODE_MIN_S = 10.0
EPISODE_MAX_S = 30.0


@dataclass(frozen=True)
class SynthConfig:
    duration_s: float = 3600.0
    fs: float = 64.0
    hr_bpm: float = 60.0
    apnea_events_per_hour: float = 0.0
    pwa_drop_frac: float = 0.5
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.duration_s < 120:
            raise ValueError(f"duration {self.duration_s} s < 120 s")
        if not 30 <= self.hr_bpm <= 180:
            raise ValueError(f"heart rate {self.hr_bpm} outside [30, 180] bpm")
        if self.fs <= 0:
            raise ValueError("fs must be positive")
        if not 0 <= self.pwa_drop_frac < 1:
            raise ValueError("pwa_drop_frac must be in [0, 1)")
        if self.apnea_events_per_hour < 0 or self.noise_sigma < 0:
            raise ValueError("rates and noise must be non-negative")


def _plant_events(config: SynthConfig, rng) -> list[ApneaEvent]:
    n_events = round(config.apnea_events_per_hour * config.duration_s / 3600.0)
    if n_events == 0:
        return []
    # window k exists iff 30k + 60 <= duration; bucket 0 is skipped so the
    # episode start stays positive
    max_bucket = int(config.duration_s // 30) - 2
    buckets = np.arange(1, max_bucket + 1)
    if n_events > buckets.size:
        raise DataError(
            f"{n_events} events do not fit in {buckets.size} label buckets"
        )
    chosen = np.sort(rng.choice(buckets, size=n_events, replace=False))
    events = []
    for k in chosen:
        end = 30.0 * k + 15.0
        dur = float(rng.uniform(EPISODE_MIN_S, EPISODE_MAX_S))
        kind = EventKind.APNEA if rng.random() < 0.5 else EventKind.HYPOPNEA
        events.append(ApneaEvent(kind=kind, start_s=end - dur, duration_s=dur))
    return events


def generate(config: SynthConfig):
    """Returns (PpgRecord, events, planted PulseLandmarks).

    The planted landmarks follow the delineation convention: a trough before
    and after every reported peak (first and last rendered beats are dropped).
    """
    rng = np.random.default_rng(config.seed)
    events = _plant_events(config, rng)
    n_samples = round(config.duration_s * config.fs)

    base_period = 60.0 / config.hr_bpm
    onsets_s = []
    t = 0.0
    beat = 0
    while t < config.duration_s + base_period:
        onsets_s.append(t)
        t += base_period * (
            1.0 + DRIFT_FRAC * np.sin(2 * np.pi * beat / DRIFT_PERIOD_BEATS)
        )
        beat += 1

    clean = np.zeros(n_samples)
    peak_samples = []
    for o_s, next_s in zip(onsets_s[:-1], onsets_s[1:]):
        lo = round(o_s * config.fs)
        hi = min(round(next_s * config.fs), n_samples)
        if hi - lo < 4 or hi > n_samples or lo < 0:
            continue
        u = (np.arange(lo, hi) - lo) / (hi - lo)
        shape = np.exp(-((u - SYSTOLIC_POS) ** 2) / (2 * SYSTOLIC_WIDTH**2))
        shape += DIASTOLIC_GAIN * np.exp(
            -((u - DIASTOLIC_POS) ** 2) / (2 * DIASTOLIC_WIDTH**2)
        )
        peak_s = o_s + SYSTOLIC_POS * (next_s - o_s)
        amp = 1.0
        for e in events:
            if e.start_s <= peak_s <= e.end_s:
                amp = 1.0 - config.pwa_drop_frac
                break
        clean[lo:hi] = amp * shape
        peak_samples.append(lo + int(np.argmax(shape)))

    tops = np.asarray(peak_samples, dtype=np.int64)
    troughs = np.array(
        [
            tops[j] + int(np.argmin(clean[tops[j] : tops[j + 1] + 1]))
            for j in range(len(tops) - 1)
        ],
        dtype=np.int64,
    )
    landmarks = PulseLandmarks(t_bp=troughs, t_tp=tops[1:-1])

    samples = clean
    if config.noise_sigma > 0:
        samples = clean + rng.normal(0.0, config.noise_sigma, size=n_samples)

    record = PpgRecord(
        subject_id=f"synth-{config.seed}",
        fs=config.fs,
        samples=samples,
        ahi_reference=config.apnea_events_per_hour,
    )
    return record, events, landmarks
