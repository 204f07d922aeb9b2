import numpy as np
import pytest

from apneakit.preprocess import (
    highpass_cheby2,
    highpass_response,
    moving_average,
    snr_db,
)

FS = 256.0


def _steady_amplitude(x):
    """Peak amplitude of a filtered sinusoid, middle half only (warm-up off)."""
    n = len(x)
    return np.abs(x[n // 4 : 3 * n // 4]).max()


class TestHighpass:
    def test_dc_attenuated_to_stopband_floor(self):
        # even-order Chebyshev II leaves a finite -40 dB floor at DC, so the
        # forward-backward residual is amplitude * 10**(-40/10)
        out = highpass_cheby2(np.full(2000, 5.0), FS, cutoff_hz=20)
        assert np.abs(out[500:1500]).max() <= 5.0 * 10 ** (-40 / 10) * 1.01

    def test_passband_sinusoid_matches_response_oracle(self):
        # tone well above the stopband edge (fs/4 vs cutoff fs/64)
        cutoff = FS / 64
        t = np.arange(4096) / FS
        x = np.sin(2 * np.pi * (FS / 4) * t)
        out = highpass_cheby2(x, FS, cutoff_hz=cutoff)
        expected = highpass_response(FS, cutoff_hz=cutoff, freqs_hz=FS / 4)[0]
        measured = _steady_amplitude(out)
        assert measured == pytest.approx(expected, rel=0.01)
        assert measured == pytest.approx(1.0, abs=0.05)

    def test_stopband_attenuation(self):
        cutoff = FS / 64
        t = np.arange(8192) / FS
        stop = highpass_cheby2(np.sin(2 * np.pi * (cutoff / 4) * t), FS, cutoff)
        passed = highpass_cheby2(np.sin(2 * np.pi * (FS / 4) * t), FS, cutoff)
        ratio_db = 20 * np.log10(_steady_amplitude(stop) / _steady_amplitude(passed))
        assert ratio_db <= -40.0
        oracle = highpass_response(FS, cutoff_hz=cutoff, freqs_hz=cutoff / 4)[0]
        assert 10 * np.log10(oracle) <= -40.0

    def test_cutoff_at_nyquist_rejected(self):
        with pytest.raises(ValueError):
            highpass_cheby2(np.zeros(100), FS, cutoff_hz=FS / 2)

    def test_output_length_preserved(self):
        x = np.random.default_rng(0).normal(size=777)
        assert len(highpass_cheby2(x, FS, 1.0)) == 777

    def test_linearity(self):
        rng = np.random.default_rng(1)
        x, y = rng.normal(size=1000), rng.normal(size=1000)
        a, b = 2.5, -1.25
        lhs = highpass_cheby2(a * x + b * y, FS, 5.0)
        rhs = a * highpass_cheby2(x, FS, 5.0) + b * highpass_cheby2(y, FS, 5.0)
        assert np.abs(lhs - rhs).max() < 1e-9 * np.abs(rhs).max()

    def test_zero_phase_keeps_peak_position(self):
        t = np.arange(1024)
        pulse = np.exp(-((t - 512.0) ** 2) / (2 * 40.0**2))
        out = highpass_cheby2(pulse, FS, 1.0)
        assert abs(int(np.argmax(out)) - 512) <= 1


class TestMovingAverage:
    def test_constant_preserved(self):
        out = moving_average(np.full(300, 3.0), 64)
        np.testing.assert_allclose(out, 3.0)

    def test_impulse_plateau_matches_convolution_oracle(self):
        x = np.zeros(400)
        x[200] = 1.0
        out = moving_average(x, 64)
        oracle = np.convolve(x, np.full(64, 1 / 64), mode="valid")
        plateau = np.flatnonzero(np.isclose(out, 1 / 64))
        assert plateau.size == 64
        assert np.isclose(oracle.max(), 1 / 64)
        assert np.count_nonzero(np.isclose(oracle, 1 / 64)) == 64

    def test_alternating_cancels(self):
        x = np.tile([1.0, -1.0], 200)
        out = moving_average(x, 64)
        np.testing.assert_allclose(out[64:-64], 0.0, atol=1e-12)

    def test_length_preserved_and_short_input_rejected(self):
        assert len(moving_average(np.arange(100.0), 64)) == 100
        with pytest.raises(ValueError):
            moving_average(np.arange(10.0), 64)

    def test_sign_flip_symmetry(self):
        x = np.random.default_rng(2).normal(size=300)
        np.testing.assert_allclose(
            moving_average(-x, 64), -moving_average(x, 64), atol=1e-12
        )


def _periodogram_oracle(x, fs):
    """Independent rfft-based band-power ratio (DC excluded)."""
    n = len(x)
    spectrum = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(n, 1 / fs)
    in_band = (freqs >= 0.5) & (freqs <= 8.0) & (freqs > 0)
    out_band = ~((freqs >= 0.5) & (freqs <= 8.0)) & (freqs > 0)
    return 10 * np.log10(spectrum[in_band].sum() / spectrum[out_band].sum())


class TestSnr:
    def test_pure_in_band_tone_is_high(self):
        fs = 64.0
        t = np.arange(60 * fs) / fs
        assert snr_db(np.sin(2 * np.pi * 1.2 * t), fs) >= 40.0

    def test_white_noise_matches_oracle(self):
        fs = 64.0
        x = np.random.default_rng(7).normal(size=int(60 * fs))
        assert snr_db(x, fs) == pytest.approx(_periodogram_oracle(x, fs), abs=0.5)

    def test_equal_band_powers_near_zero_db(self):
        fs = 64.0
        n = int(60 * fs)
        t = np.arange(n) / fs
        # equal total power: same amplitude, both bin-centered frequencies
        x = np.sin(2 * np.pi * 1.2 * t) + np.sin(2 * np.pi * 20.0 * t)
        assert snr_db(x, fs) == pytest.approx(0.0, abs=0.5)

    def test_out_of_band_silence_capped(self):
        fs = 64.0
        t = np.arange(int(4 * fs)) / fs
        # constant (DC only outside the band) -> zero out-of-band power
        assert snr_db(np.ones_like(t), fs) == 100.0

    def test_too_short_window_rejected(self):
        with pytest.raises(ValueError):
            snr_db(np.zeros(10), 64.0)
