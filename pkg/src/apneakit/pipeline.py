"""Per-subject extraction pipeline: segment -> filter -> delineate -> features.

Shared by the CLI ``extract`` subcommand and the end-to-end tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import preprocess, pulse_features, windowing
from .errors import ApneaKitError
from .signal_io import ApneaEvent, PpgRecord


@dataclass(frozen=True)
class ExtractConfig:
    hp_cutoff_hz: float = 20.0
    hp_atten_db: float = 40.0
    ma_width: int = 64
    min_separation: int = pulse_features.DEFAULT_MIN_SEPARATION
    rejection: windowing.RejectionConfig = windowing.RejectionConfig()


@dataclass(frozen=True)
class SubjectFeatures:
    subject_id: str
    features: np.ndarray      # [n_kept, 7, 60], unstandardized
    labels: np.ndarray        # [n_kept]
    kept_indices: np.ndarray  # window indices that survived rejection
    all_labels: np.ndarray    # labels of every window incl. rejected
    rejected: dict[int, str]  # window index -> reason


def extract_subject(
    record: PpgRecord,
    events: list[ApneaEvent],
    config: ExtractConfig = ExtractConfig(),
) -> SubjectFeatures:
    windows = windowing.annotate_all(windowing.segment(record), events)
    features = []
    labels = []
    kept = []
    rejected = {}
    for w in windows:
        try:
            filtered = preprocess.highpass_cheby2(
                w.samples, record.fs, config.hp_cutoff_hz, config.hp_atten_db
            )
            smoothed = preprocess.moving_average(filtered, config.ma_width)
            outcome = pulse_features.delineate(smoothed, config.min_separation)
        except (ApneaKitError, ValueError) as e:
            outcome = e
        is_rejected, reason = windowing.reject(w, outcome, config.rejection)
        if is_rejected:
            rejected[w.index] = reason.value
            continue
        try:
            matrix = pulse_features.window_feature_matrix(
                smoothed, record.fs, outcome
            )
        except ApneaKitError as e:
            rejected[w.index] = windowing.RejectReason.TOO_FEW_PULSES.value
            continue
        features.append(matrix)
        labels.append(w.label)
        kept.append(w.index)
    n = len(features)
    return SubjectFeatures(
        subject_id=record.subject_id,
        features=np.asarray(features).reshape(n, pulse_features.NUM_FEATURES, -1),
        labels=np.asarray(labels, dtype=np.int64),
        kept_indices=np.asarray(kept, dtype=np.int64),
        all_labels=np.asarray([w.label for w in windows], dtype=np.int64),
        rejected=rejected,
    )
