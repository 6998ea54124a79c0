import math
import struct

import numpy as np
import pytest

from bokit.audio import (
    AudioBuffer,
    FRAME_HOP_S,
    decode_wav,
    encode_wav,
    loudness_gain,
    measure_quality,
    normalize_loudness,
    resample,
    trim_silence,
)
from bokit.errors import (
    AllZeroInputError,
    EmptyBufferError,
    FullySilentError,
    MalformedHeaderError,
    UnsupportedEncodingError,
)

RATE = 16000


def sine(freq=440.0, amp=0.5, duration=1.0, rate=RATE):
    t = np.arange(int(duration * rate)) / rate
    return AudioBuffer(amp * np.sin(2 * np.pi * freq * t), rate)


def silence_tone_silence(rate=RATE, amp=0.5):
    tone = sine(amp=amp, rate=rate).samples
    gap = np.zeros(rate // 2)
    return AudioBuffer(np.concatenate([gap, tone, gap]), rate)


class TestWav:
    def test_silence_roundtrip(self):
        buf = AudioBuffer(np.zeros(RATE), RATE)
        out = decode_wav(encode_wav(buf))
        assert out.sample_rate == RATE
        assert len(out.samples) == RATE
        assert np.all(out.samples == 0.0)

    def test_stereo_averages_to_mono(self):
        # +0.5 / -0.5 everywhere -> all-zero mono
        frames = np.empty(2 * RATE, dtype=np.float32)
        frames[0::2] = 0.5
        frames[1::2] = -0.5
        payload = frames.tobytes()
        header = struct.pack(
            "<4sI4s4sIHHIIHH4sI",
            b"RIFF", 36 + len(payload), b"WAVE",
            b"fmt ", 16, 3, 2, RATE, RATE * 8, 8, 32,
            b"data", len(payload),
        )
        out = decode_wav(header + payload)
        assert np.all(out.samples == 0.0)

    def test_mulaw_rejected(self):
        payload = b"\x00" * 64
        header = struct.pack(
            "<4sI4s4sIHHIIHH4sI",
            b"RIFF", 36 + len(payload), b"WAVE",
            b"fmt ", 16, 7, 1, 8000, 8000, 1, 8,
            b"data", len(payload),
        )
        with pytest.raises(UnsupportedEncodingError):
            decode_wav(header + payload)

    def test_garbage_rejected(self):
        with pytest.raises(MalformedHeaderError):
            decode_wav(b"OggS\x00\x00")

    def test_requantization_is_stable(self):
        buf = sine()
        once = decode_wav(encode_wav(buf))
        twice = decode_wav(encode_wav(once))
        assert np.array_equal(once.samples, twice.samples)


class TestResample:
    def test_identity_when_rate_matches(self):
        buf = sine()
        assert resample(buf, RATE) is buf

    def test_tone_frequency_preserved(self):
        buf = sine(rate=48000)
        out = resample(buf, 24000)
        spectrum = np.abs(np.fft.rfft(out.samples))
        peak_hz = np.argmax(spectrum) * 24000 / len(out.samples)
        assert abs(peak_hz - 440.0) / 440.0 < 0.001

    def test_length_arithmetic(self):
        out = resample(sine(rate=48000), 24000)
        assert abs(len(out.samples) - 24000) <= 1

    def test_upsampling_tone_fidelity(self):
        out = resample(sine(rate=16000), 48000)
        spectrum = np.abs(np.fft.rfft(out.samples))
        peak_hz = np.argmax(spectrum) * 48000 / len(out.samples)
        assert abs(peak_hz - 440.0) / 440.0 < 0.001
        out_rms = np.sqrt(np.mean(out.samples ** 2))
        assert abs(20 * np.log10(out_rms / (0.5 / np.sqrt(2)))) < 0.5

    def test_energy_conserved(self):
        buf = sine(rate=48000)
        out = resample(buf, 24000)
        in_rms = np.sqrt(np.mean(buf.samples ** 2))
        out_rms = np.sqrt(np.mean(out.samples ** 2))
        assert abs(20 * np.log10(out_rms / in_rms)) < 0.5

    def test_invalid_rate(self):
        with pytest.raises(ValueError):
            resample(sine(), 0)


class TestLoudness:
    def test_hits_target_from_closed_form(self):
        # sine amplitude 0.5 has RMS amp/sqrt(2) = -13.01 dBFS
        buf = sine(amp=0.5)
        out = normalize_loudness(buf, -23.0)
        report = measure_quality(out)
        assert abs(report.rms_dbfs - (-23.0)) < 0.1

    def test_gain_is_uniform(self):
        buf = sine(amp=0.25)
        out = normalize_loudness(buf, -23.0)
        ratio = out.samples[100] / buf.samples[100]
        assert np.allclose(out.samples, buf.samples * ratio)

    def test_already_at_target_is_identity(self):
        buf = normalize_loudness(sine(amp=0.5), -23.0)
        again = normalize_loudness(buf, -23.0)
        assert np.max(np.abs(again.samples - buf.samples)) < 1e-6

    def test_peak_cap_reported(self):
        # amplitude 0.9 sine: RMS -3.9 dBFS; pushing to 0 dBFS would clip
        buf = sine(amp=0.9)
        gain, capped = loudness_gain(buf, 0.0)
        assert capped
        out = normalize_loudness(buf, 0.0)
        assert np.max(np.abs(out.samples)) <= 10 ** (-0.1 / 20) + 1e-12

    def test_capped_gain_idempotent(self):
        buf = sine(amp=0.9)
        once = normalize_loudness(buf, 0.0)
        twice = normalize_loudness(once, 0.0)
        assert np.max(np.abs(twice.samples - once.samples)) < 1e-6

    def test_all_zero_input(self):
        with pytest.raises(AllZeroInputError):
            normalize_loudness(AudioBuffer(np.zeros(100), RATE), -23.0)


class TestTrim:
    def test_silence_tone_silence_duration(self):
        buf = silence_tone_silence()
        out = trim_silence(buf, -45.0, 50.0)
        assert abs(out.duration_s - 1.1) <= FRAME_HOP_S + 1e-9

    def test_no_silence_is_identity(self):
        buf = sine()
        out = trim_silence(buf, -45.0, 50.0)
        assert np.array_equal(out.samples, buf.samples)

    def test_idempotent_exactly(self):
        out = trim_silence(silence_tone_silence(), -45.0, 50.0)
        again = trim_silence(out, -45.0, 50.0)
        assert np.array_equal(again.samples, out.samples)

    def test_interior_silence_untouched(self):
        tone = sine(duration=0.5).samples
        gap = np.zeros(RATE // 2)
        buf = AudioBuffer(np.concatenate([gap, tone, gap, tone, gap]), RATE)
        out = trim_silence(buf, -45.0, 50.0)
        # the interior half-second gap survives
        assert out.duration_s > 1.4

    def test_fully_silent(self):
        with pytest.raises(FullySilentError):
            trim_silence(AudioBuffer(np.zeros(RATE), RATE), -45.0, 50.0)

    def test_keeps_pad_of_context(self):
        buf = silence_tone_silence()
        out = trim_silence(buf, -45.0, 100.0)
        report = measure_quality(out)
        assert report.leading_silence_s >= 0.05
        assert report.trailing_silence_s >= 0.05


class TestMeasure:
    def test_full_scale_square(self):
        buf = AudioBuffer(np.ones(RATE), RATE)
        report = measure_quality(buf)
        assert report.rms_dbfs == 0.0
        assert report.peak_dbfs == 0.0
        assert report.clipping_ratio == 1.0

    def test_sine_closed_forms(self):
        report = measure_quality(sine(amp=0.5))
        assert abs(report.peak_dbfs - 20 * math.log10(0.5)) < 0.1
        assert abs(report.rms_dbfs - 20 * math.log10(0.5 / math.sqrt(2))) < 0.1

    def test_tone_plus_silence_snr(self):
        report = measure_quality(silence_tone_silence())
        assert report.snr_db >= 40.0

    def test_duration_and_silence_fields(self):
        report = measure_quality(silence_tone_silence())
        assert report.duration_s == 2.0
        assert 0.4 <= report.leading_silence_s <= 0.5
        assert 0.4 <= report.trailing_silence_s <= 0.5

    def test_rms_never_exceeds_peak(self):
        for amp in (0.1, 0.5, 0.99):
            report = measure_quality(sine(amp=amp))
            assert report.rms_dbfs <= report.peak_dbfs

    def test_read_only(self):
        buf = sine()
        before = buf.samples.copy()
        measure_quality(buf)
        assert np.array_equal(buf.samples, before)

    def test_empty_buffer(self):
        with pytest.raises(EmptyBufferError):
            measure_quality(AudioBuffer(np.zeros(0), RATE))


class TestRangeInvariant:
    def test_ops_never_leave_unit_range(self):
        buf = silence_tone_silence(amp=0.99)
        for out in (
            resample(buf, 24000),
            normalize_loudness(buf, -3.0),
            trim_silence(buf, -45.0, 20.0),
        ):
            assert np.max(np.abs(out.samples)) <= 1.0
