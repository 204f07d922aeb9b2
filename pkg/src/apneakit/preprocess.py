"""Window filtering and signal-quality SNR.

The high-pass default cutoff of 20 Hz follows the source convention even
though it suppresses the cardiac band (~1-2 Hz); pipelines working on pulse
morphology should pass a sub-cardiac cutoff (e.g. 0.5 Hz) via ``--hp-cutoff``.
"""

from __future__ import annotations

import numpy as np
from scipy import signal

SNR_BAND_HZ = (0.5, 8.0)
SNR_CAP_DB = 100.0
MIN_FILTER_LEN = 16


def highpass_cheby2(
    samples,
    fs: float,
    cutoff_hz: float = 20.0,
    stop_atten_db: float = 40.0,
):
    """Second-order Chebyshev type II high-pass, applied forward-backward so
    landmark timing is preserved. Output length equals input length."""
    x = np.asarray(samples, dtype=np.float64)
    if cutoff_hz <= 0 or cutoff_hz >= fs / 2:
        raise ValueError(f"cutoff {cutoff_hz} Hz outside (0, {fs / 2}) Hz")
    if x.size < MIN_FILTER_LEN:
        raise ValueError(f"need at least {MIN_FILTER_LEN} samples, got {x.size}")
    sos = signal.cheby2(
        2, stop_atten_db, cutoff_hz, btype="highpass", fs=fs, output="sos"
    )
    return signal.sosfiltfilt(sos, x)


def highpass_response(fs, cutoff_hz=20.0, stop_atten_db=40.0, freqs_hz=None):
    """Forward-backward magnitude response |H|^2 of the high-pass design at
    the given frequencies (Hz). Oracle helper for tests."""
    sos = signal.cheby2(
        2, stop_atten_db, cutoff_hz, btype="highpass", fs=fs, output="sos"
    )
    w, h = signal.sosfreqz(sos, worN=np.atleast_1d(freqs_hz), fs=fs)
    return np.abs(h) ** 2


def moving_average(samples, width: int = 64):
    """Forward-window mean: out[i] = mean(samples[i : i+width]) over valid
    positions, then edge-replicated (first valid left, last valid right) back
    to the input length."""
    x = np.asarray(samples, dtype=np.float64)
    if width < 1:
        raise ValueError(f"width {width} must be >= 1")
    if x.size < width:
        raise ValueError(f"signal length {x.size} < width {width}")
    valid = np.convolve(x, np.full(width, 1.0 / width), mode="valid")
    pad = width - 1
    left = pad // 2
    right = pad - left
    return np.concatenate(
        [np.full(left, valid[0]), valid, np.full(right, valid[-1])]
    )


def snr_db(window_samples, fs: float) -> float:
    """Periodogram SNR: in-band power (0.5-8 Hz) over out-of-band power,
    DC bin excluded. Returns at most +100 dB."""
    x = np.asarray(window_samples, dtype=np.float64)
    if x.size < 2 * fs:
        raise ValueError(f"need >= 2 s of samples, got {x.size / fs:.2f} s")
    freqs, power = signal.periodogram(x, fs=fs, window="boxcar")
    lo, hi = SNR_BAND_HZ
    in_band = (freqs >= lo) & (freqs <= hi)
    nonzero = freqs > 0
    p_band = float(power[in_band & nonzero].sum())
    p_rest = float(power[~in_band & nonzero].sum())
    if p_rest <= 0.0:
        return SNR_CAP_DB
    if p_band <= 0.0:
        return -SNR_CAP_DB
    return float(min(10.0 * np.log10(p_band / p_rest), SNR_CAP_DB))
