"""Subject-independent splits, classification metrics, and AHI estimation.

Outer folds hold out ~20% of subjects, balanced between the AHI<=15 and
AHI>15 strata (counts differ by at most 1). Inner folds 5-fold-partition the
shuffled development windows; test windows are never shuffled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

N_OUTER_FOLDS = 5
N_INNER_FOLDS = 5
TEST_FRACTION = 0.2
AHI_STRATUM_CUT = 15.0
HOP_S = 30.0


class Severity(Enum):
    NORMAL = "normal"
    MILD = "mild"
    MODERATE = "moderate"
    SEVERE = "severe"


@dataclass(frozen=True)
class OuterFold:
    development: tuple[str, ...]
    test: tuple[str, ...]
    # 5 inner folds: (train window ids, validation window ids), each id a
    # (subject_id, window_index) pair over the development subjects
    inner: tuple[tuple[tuple, tuple], ...]


@dataclass(frozen=True)
class SplitPlan:
    seed: int
    outer_folds: tuple[OuterFold, ...]


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    macro_f1: float
    sensitivity: float
    specificity: float
    undefined: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "accuracy": round(self.accuracy, 2),
            "macro_f1": round(self.macro_f1, 2),
            "sensitivity": round(self.sensitivity, 2),
            "specificity": round(self.specificity, 2),
            "undefined": list(self.undefined),
        }


@dataclass(frozen=True)
class SubjectSummary:
    subject_id: str
    ahi_reference: float | None
    sahi: float
    pahi: float
    severity: Severity

    def as_dict(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "ahi_reference": self.ahi_reference,
            "sahi": round(self.sahi, 4),
            "pahi": round(self.pahi, 4),
            "severity": self.severity.value,
        }


def make_splits(subjects, seed: int, window_counts=None) -> SplitPlan:
    """Build the nested cross-validation plan.

    ``subjects``: sequence of (subject_id, ahi) pairs. ``window_counts``
    optionally maps subject_id -> number of windows; absent subjects
    contribute a single window id (subject_id, 0).
    """
    subjects = [(str(s), float(a)) for s, a in subjects]
    if len(subjects) < 10:
        raise ValueError(f"need >= 10 subjects, got {len(subjects)}")
    low = [s for s, a in subjects if a <= AHI_STRATUM_CUT]
    high = [s for s, a in subjects if a > AHI_STRATUM_CUT]
    if not low or not high:
        raise ValueError("both AHI strata (<=15, >15) must be non-empty")
    window_counts = window_counts or {}

    n_test = max(2, round(TEST_FRACTION * len(subjects)))
    rng = np.random.default_rng(seed)
    outer_folds = []
    for _ in range(N_OUTER_FOLDS):
        big, small = (low, high) if len(low) >= len(high) else (high, low)
        n_small = min(n_test // 2, len(small))
        n_big = min(n_test - n_small, len(big))
        test = sorted(
            map(
                str,
                list(rng.choice(small, size=n_small, replace=False))
                + list(rng.choice(big, size=n_big, replace=False)),
            )
        )
        dev = sorted(s for s, _ in subjects if s not in set(test))

        window_ids = [
            (s, i) for s in dev for i in range(window_counts.get(s, 1))
        ]
        shuffled = [window_ids[j] for j in rng.permutation(len(window_ids))]
        parts = [list(shuffled[i::N_INNER_FOLDS]) for i in range(N_INNER_FOLDS)]
        inner = []
        for i in range(N_INNER_FOLDS):
            val = tuple(parts[i])
            train = tuple(w for j in range(N_INNER_FOLDS) if j != i for w in parts[j])
            inner.append((train, val))
        outer_folds.append(
            OuterFold(development=tuple(dev), test=tuple(test), inner=tuple(inner))
        )
    return SplitPlan(seed=seed, outer_folds=tuple(outer_folds))


def compute_metrics(predictions, labels) -> Metrics:
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if predictions.size == 0 or predictions.shape != labels.shape:
        raise ValueError("predictions and labels must be equal-length, non-empty")
    tp = int(((predictions == 1) & (labels == 1)).sum())
    fn = int(((predictions == 0) & (labels == 1)).sum())
    tn = int(((predictions == 0) & (labels == 0)).sum())
    fp = int(((predictions == 1) & (labels == 0)).sum())

    undefined = []
    accuracy = 100.0 * (tp + tn) / len(labels)
    if tp + fn > 0:
        sensitivity = 100.0 * tp / (tp + fn)
    else:
        sensitivity, undefined = 0.0, undefined + ["sensitivity"]
    if tn + fp > 0:
        specificity = 100.0 * tn / (tn + fp)
    else:
        specificity, undefined = 0.0, undefined + ["specificity"]

    def f1(tp_, fp_, fn_):
        denom = 2 * tp_ + fp_ + fn_
        return 100.0 * 2 * tp_ / denom if denom else 0.0

    macro_f1 = 0.5 * (f1(tp, fp, fn) + f1(tn, fn, fp))
    return Metrics(
        accuracy=accuracy,
        macro_f1=macro_f1,
        sensitivity=sensitivity,
        specificity=specificity,
        undefined=tuple(undefined),
    )


def aggregate_folds(fold_metrics) -> dict[str, tuple[float, float]]:
    """Mean and sample (n-1) standard deviation per metric over folds."""
    fold_metrics = list(fold_metrics)
    if len(fold_metrics) < 2:
        raise ValueError(f"need >= 2 folds, got {len(fold_metrics)}")
    out = {}
    for name in ("accuracy", "macro_f1", "sensitivity", "specificity"):
        values = np.array([getattr(m, name) for m in fold_metrics])
        out[name] = (float(values.mean()), float(values.std(ddof=1)))
    return out


def sahi(labels) -> float:
    """Sampled AHI from ground-truth window labels (events/hour)."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("need at least one window")
    return float(labels.sum() / (HOP_S * labels.size + HOP_S) * 3600.0)


def pahi(predictions) -> float:
    """Predicted AHI: same estimator applied to model predictions."""
    return sahi(predictions)


def pearson(xs, ys) -> float:
    """Product-moment correlation; NaN when either input has zero variance."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size < 2 or xs.shape != ys.shape:
        raise ValueError("need two equal-length sequences of length >= 2")
    xd = xs - xs.mean()
    yd = ys - ys.mean()
    denom = np.sqrt((xd**2).sum() * (yd**2).sum())
    if denom == 0.0:
        return float("nan")
    return float(np.clip((xd * yd).sum() / denom, -1.0, 1.0))


def severity(ahi: float) -> Severity:
    """Clinical bands: normal < 5 <= mild < 15 <= moderate < 30 <= severe."""
    if ahi < 0:
        raise ValueError(f"AHI {ahi} must be non-negative")
    if ahi < 5:
        return Severity.NORMAL
    if ahi < 15:
        return Severity.MILD
    if ahi < 30:
        return Severity.MODERATE
    return Severity.SEVERE


def summarize_subject(
    subject_id: str, labels, predictions, ahi_reference=None
) -> SubjectSummary:
    p = pahi(predictions)
    return SubjectSummary(
        subject_id=subject_id,
        ahi_reference=ahi_reference,
        sahi=sahi(labels),
        pahi=p,
        severity=severity(p),
    )
