import numpy as np
import pytest

from apneakit.errors import NoPulsesError
from apneakit.pulse_features import delineate
from apneakit.signal_io import ApneaEvent, EventKind, PpgRecord
from apneakit.windowing import (
    LabeledWindow,
    RejectReason,
    RejectionConfig,
    annotate,
    annotate_all,
    reject,
    segment,
)

FS = 64.0


def _record(duration_s, fs=FS):
    n = round(duration_s * fs)
    t = np.arange(n) / fs
    return PpgRecord("w", fs, np.sin(2 * np.pi * t) + 2.0)


def _window(start_s, samples=None):
    return LabeledWindow(
        subject_id="w",
        index=int(start_s // 30),
        start_s=start_s,
        samples=np.zeros(int(60 * FS)) if samples is None else samples,
    )


def _event(end_s, kind=EventKind.APNEA, duration=10.0):
    return ApneaEvent(kind=kind, start_s=end_s - duration, duration_s=duration)


class TestSegment:
    def test_120s_record_gives_three_windows(self):
        windows = segment(_record(120))
        assert [w.start_s for w in windows] == [0.0, 30.0, 60.0]

    def test_exactly_60s_gives_one_window(self):
        assert len(segment(_record(60))) == 1

    def test_59s_gives_none(self):
        assert segment(_record(59)) == []

    def test_3600s_gives_119(self):
        assert len(segment(_record(3600))) == 119

    def test_consecutive_windows_share_30s(self):
        windows = segment(_record(150))
        hop = round(30 * FS)
        for a, b in zip(windows, windows[1:]):
            np.testing.assert_array_equal(a.samples[hop:], b.samples[:hop])

    def test_window_sample_count(self):
        for w in segment(_record(150)):
            assert w.samples.size == round(60 * FS)
            assert w.start_s == 30.0 * w.index


class TestAnnotate:
    def test_event_in_first_half(self):
        assert annotate(_window(60.0), [_event(70.0)]) == 1

    def test_event_in_second_half_labels_next_window(self):
        e = _event(105.0, kind=EventKind.HYPOPNEA)
        assert annotate(_window(60.0), [e]) == 0
        assert annotate(_window(90.0), [e]) == 1

    def test_no_events(self):
        assert annotate(_window(0.0), []) == 0

    def test_boundary_is_half_open(self):
        assert annotate(_window(60.0), [_event(90.0)]) == 0
        assert annotate(_window(90.0), [_event(90.0)]) == 1

    def test_each_event_labels_exactly_one_window(self):
        rng = np.random.default_rng(23)
        windows = segment(_record(600))
        for _ in range(50):
            end = float(rng.uniform(10.0, 30.0 * len(windows)))
            labeled = annotate_all(windows, [_event(end, duration=5.0)])
            assert sum(w.label for w in labeled) == 1

    def test_label_invariant_to_event_kind(self):
        for end in (35.0, 61.0, 89.9):
            a = annotate(_window(30.0), [_event(end, kind=EventKind.APNEA)])
            h = annotate(_window(30.0), [_event(end, kind=EventKind.HYPOPNEA)])
            assert a == h


class TestReject:
    def test_clean_pulse_train_kept(self):
        t = np.arange(int(60 * FS)) / FS
        x = np.sin(2 * np.pi * 1.0 * t)  # 60 pulses/min
        w = _window(0.0, samples=x)
        landmarks = delineate(x)
        rejected, reason = reject(w, landmarks)
        assert not rejected and reason is None
        assert landmarks.n_pulses >= 30

    def test_flat_line_rejected(self):
        x = np.zeros(int(60 * FS))
        w = _window(0.0, samples=x)
        try:
            outcome = delineate(x)
        except NoPulsesError as e:
            outcome = e
        rejected, reason = reject(w, outcome)
        assert rejected and reason is RejectReason.TOO_FEW_PULSES

    def test_nan_window_rejected(self):
        x = np.zeros(int(60 * FS))
        x[5] = np.nan
        rejected, reason = reject(_window(0.0, samples=x), None)
        assert rejected and reason is RejectReason.NONFINITE

    def test_implausible_ppi_rejected(self):
        # 0.25 s intervals: every PPI below the 0.3 s floor
        t = np.arange(int(60 * FS)) / FS
        x = np.sin(2 * np.pi * 4.0 * t)
        w = _window(0.0, samples=x)
        landmarks = delineate(x, min_separation=5)
        config = RejectionConfig(min_pulses=30)
        rejected, reason = reject(w, landmarks, config)
        assert rejected and reason is RejectReason.IMPLAUSIBLE_PPI
