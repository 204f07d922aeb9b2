"""60 s / 50 %-overlap segmentation, first-half labeling, window rejection."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .signal_io import ApneaEvent, PpgRecord

WINDOW_S = 60.0
HOP_S = 30.0


class RejectReason(Enum):
    TOO_FEW_PULSES = "too_few_pulses"
    IMPLAUSIBLE_PPI = "implausible_ppi"
    NONFINITE = "nonfinite"


@dataclass(frozen=True)
class RejectionConfig:
    """Physiological plausibility thresholds (configurable, not clinical)."""

    min_pulses: int = 30
    ppi_min_s: float = 0.3
    ppi_max_s: float = 2.0
    max_bad_ppi_frac: float = 0.2


@dataclass(frozen=True)
class LabeledWindow:
    subject_id: str
    index: int
    start_s: float
    samples: np.ndarray = field(repr=False)
    label: int | None = None
    rejected: bool = False
    reason: RejectReason | None = None


def segment(record: PpgRecord) -> list[LabeledWindow]:
    """Windows at starts 0, 30, 60, ... while a full 60 s fits. Records
    shorter than 60 s yield an empty list."""
    wlen = round(WINDOW_S * record.fs)
    hop = round(HOP_S * record.fs)
    n = record.samples.size
    windows = []
    index = 0
    while index * hop + wlen <= n:
        start = index * hop
        windows.append(
            LabeledWindow(
                subject_id=record.subject_id,
                index=index,
                start_s=index * HOP_S,
                samples=record.samples[start : start + wlen],
            )
        )
        index += 1
    return windows


def annotate(window: LabeledWindow, events: list[ApneaEvent]) -> int:
    """1 iff some event's end timestamp falls in the window's first half,
    the half-open interval [start, start + 30)."""
    for event in events:
        if window.start_s <= event.end_s < window.start_s + HOP_S:
            return 1
    return 0


def annotate_all(
    windows: list[LabeledWindow], events: list[ApneaEvent]
) -> list[LabeledWindow]:
    return [replace(w, label=annotate(w, events)) for w in windows]


def reject(
    window: LabeledWindow,
    landmarks_or_error,
    config: RejectionConfig = RejectionConfig(),
) -> tuple[bool, RejectReason | None]:
    """Decide whether a window is unusable, given the delineation outcome
    (a PulseLandmarks or the exception delineation raised)."""
    if not np.all(np.isfinite(window.samples)):
        return True, RejectReason.NONFINITE
    if isinstance(landmarks_or_error, Exception):
        return True, RejectReason.TOO_FEW_PULSES
    landmarks = landmarks_or_error
    if landmarks.n_pulses < config.min_pulses:
        return True, RejectReason.TOO_FEW_PULSES
    fs = window.samples.size / WINDOW_S
    ppi = np.diff(landmarks.t_tp) / fs
    if ppi.size:
        bad = np.mean((ppi < config.ppi_min_s) | (ppi > config.ppi_max_s))
        if bad > config.max_bad_ppi_frac:
            return True, RejectReason.IMPLAUSIBLE_PPI
    return False, None
