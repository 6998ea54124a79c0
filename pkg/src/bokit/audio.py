"""Audio-side quality enhancement: WAV I/O, resampling, loudness
normalization, silence trimming, and quality measurement.

All operations are pure transformations over a mono float buffer in
[-1, 1]. Frame-based measurements (silence detection, SNR) share one
geometry, 25 ms windows on a 10 ms hop, so they stay mutually consistent.
Trim cuts are snapped to whole hops, which keeps the frame grid aligned
with the signal and makes trimming exactly idempotent.

dBFS values are floored at -120 dB so digital silence stays finite and
JSON-safe.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy.signal import resample_poly

from .errors import (
    AllZeroInputError,
    EmptyBufferError,
    FullySilentError,
    MalformedHeaderError,
    UnsupportedEncodingError,
)

FRAME_WINDOW_S = 0.025
FRAME_HOP_S = 0.010

DBFS_FLOOR = -120.0
CLIPPING_LEVEL = 0.999
PEAK_CEILING_DBFS = -0.1
SILENCE_REPORT_THRESHOLD_DBFS = -60.0

# Gains this close to unity are skipped outright so that re-running the
# pipeline over its own 16-bit output never nudges samples.
GAIN_SNAP_DB = 0.01

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio, samples in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        object.__setattr__(
            self, "samples", np.asarray(self.samples, dtype=np.float64)
        )
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class AudioQualityReport:
    duration_s: float
    rms_dbfs: float
    peak_dbfs: float
    clipping_ratio: float
    snr_db: float
    leading_silence_s: float
    trailing_silence_s: float


def dbfs(level: float) -> float:
    """Linear amplitude ratio -> dBFS, floored at DBFS_FLOOR."""
    if level <= 0:
        return DBFS_FLOOR
    return max(DBFS_FLOOR, 20.0 * math.log10(level))


def rms(samples: np.ndarray) -> float:
    if len(samples) == 0:
        return 0.0
    return float(np.sqrt(np.mean(np.square(samples))))


# --- WAV container ---------------------------------------------------------


def decode_wav(data: bytes) -> AudioBuffer:
    """Decode a RIFF/WAVE byte string to a mono buffer.

    Accepts PCM 16-bit and IEEE float 32-bit, 1-2 channels; channels are
    averaged. Compressed or exotic encodings raise UnsupportedEncodingError.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedHeaderError("not a RIFF/WAVE stream")
    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise MalformedHeaderError("fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)
    if fmt is None or payload is None:
        raise MalformedHeaderError("missing fmt or data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if channels not in (1, 2):
        raise UnsupportedEncodingError(f"unsupported channel count {channels}")
    if sample_rate <= 0:
        raise MalformedHeaderError(f"invalid sample rate {sample_rate}")
    if audio_format == _WAVE_FORMAT_PCM and bits == 16:
        raw = np.frombuffer(payload, dtype="<i2").astype(np.float64) / 32768.0
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedEncodingError(
            f"unsupported encoding: format tag {audio_format}, {bits}-bit"
        )
    if channels == 2:
        if len(raw) % 2:
            raw = raw[:-1]
        raw = raw.reshape(-1, 2).mean(axis=1)
    return AudioBuffer(samples=np.clip(raw, -1.0, 1.0), sample_rate=sample_rate)


def encode_wav(buf: AudioBuffer) -> bytes:
    """Encode as PCM 16-bit little-endian mono."""
    scaled = np.clip(np.rint(buf.samples * 32768.0), -32768, 32767).astype("<i2")
    payload = scaled.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, _WAVE_FORMAT_PCM, 1, buf.sample_rate,
        buf.sample_rate * 2, 2, 16,
        b"data", len(payload),
    )
    return header + payload


def read_wav(path) -> AudioBuffer:
    with open(path, "rb") as fh:
        return decode_wav(fh.read())


def write_wav(path, buf: AudioBuffer) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_wav(buf))


# --- Transformations -------------------------------------------------------


def resample(buf: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Polyphase resampling; identity when the rate already matches."""
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    if target_rate == buf.sample_rate:
        return buf
    g = math.gcd(target_rate, buf.sample_rate)
    out = resample_poly(buf.samples, target_rate // g, buf.sample_rate // g)
    return AudioBuffer(samples=np.clip(out, -1.0, 1.0), sample_rate=target_rate)


def loudness_gain(buf: AudioBuffer, target_rms_dbfs: float) -> tuple[float, bool]:
    """(linear gain, capped?) that takes the buffer to the target RMS.

    The gain is capped so the peak never exceeds PEAK_CEILING_DBFS, and
    snapped to unity when within GAIN_SNAP_DB of it.
    """
    level = rms(buf.samples)
    if level == 0.0:
        raise AllZeroInputError("cannot normalize loudness of an all-zero buffer")
    gain = 10.0 ** ((target_rms_dbfs - dbfs(level)) / 20.0)
    if abs(20.0 * math.log10(gain)) < GAIN_SNAP_DB:
        return 1.0, False
    peak = float(np.max(np.abs(buf.samples)))
    ceiling = 10.0 ** (PEAK_CEILING_DBFS / 20.0)
    if peak * gain > ceiling:
        return ceiling / peak, True
    return gain, False


def normalize_loudness(buf: AudioBuffer, target_rms_dbfs: float) -> AudioBuffer:
    """Apply uniform gain to reach the target RMS within +/-0.1 dB.

    When the required gain would push the peak above -0.1 dBFS the gain is
    capped there instead; use :func:`loudness_gain` to observe the cap.
    """
    gain, _ = loudness_gain(buf, target_rms_dbfs)
    if gain == 1.0:
        return buf
    return AudioBuffer(samples=buf.samples * gain, sample_rate=buf.sample_rate)


def frame_geometry(sample_rate: int) -> tuple[int, int]:
    window = max(1, int(round(FRAME_WINDOW_S * sample_rate)))
    hop = max(1, int(round(FRAME_HOP_S * sample_rate)))
    return window, hop


def frame_rms(samples: np.ndarray, sample_rate: int) -> np.ndarray:
    """RMS per frame; the final frames may cover a truncated window."""
    window, hop = frame_geometry(sample_rate)
    starts = range(0, max(1, len(samples)), hop)
    return np.array([rms(samples[s:s + window]) for s in starts if s < len(samples)])


def trim_silence(
    buf: AudioBuffer, threshold_dbfs: float, pad_ms: float
) -> AudioBuffer:
    """Cut leading/trailing sub-threshold frames, keeping pad_ms of context.

    Interior silence is untouched. Cut points are multiples of the frame
    hop, so applying the trim twice changes nothing. A buffer with no
    frame above the threshold raises FullySilentError: such a record
    should be rejected, not silently emptied.
    """
    if threshold_dbfs >= 0:
        raise ValueError(f"threshold_dbfs must be negative, got {threshold_dbfs}")
    if pad_ms < 0:
        raise ValueError(f"pad_ms must be >= 0, got {pad_ms}")
    if len(buf.samples) == 0:
        raise FullySilentError("empty buffer is silent by definition")

    window, hop = frame_geometry(buf.sample_rate)
    levels = frame_rms(buf.samples, buf.sample_rate)
    loud = np.flatnonzero(levels >= 10.0 ** (threshold_dbfs / 20.0))
    if len(loud) == 0:
        raise FullySilentError(
            f"entire buffer below {threshold_dbfs} dBFS"
        )
    k0, k1 = int(loud[0]), int(loud[-1])
    n = len(buf.samples)
    pad = int(round(pad_ms / 1000.0 * buf.sample_rate))

    # Onset estimate: the quiet frame before k0 ends at k0*hop + (window -
    # hop); speech cannot start earlier than that by more than the frame
    # overlap. The symmetric end estimate is the start of the quiet frame
    # after k1.
    lead_cut = 0
    if k0 > 0:
        onset_est = k0 * hop + (window - hop)
        lead_cut = hop * max(0, (onset_est - pad) // hop)
    tail_cut = n
    if k1 < len(levels) - 1:
        end_est = (k1 + 1) * hop
        removable = max(0, (n - end_est - pad) // hop)
        tail_cut = n - hop * removable
    return AudioBuffer(samples=buf.samples[lead_cut:tail_cut], sample_rate=buf.sample_rate)


# --- Measurement -----------------------------------------------------------


def measure_quality(buf: AudioBuffer) -> AudioQualityReport:
    """Read-only quality attributes of a buffer.

    SNR is the energy contrast between loud and quiet frames:
    10*log10(mean energy of frames at or above the 80th energy percentile
    over mean energy of frames at or below the 20th), capped to
    +/-DBFS_FLOOR magnitude when a side is empty of energy.
    """
    if len(buf.samples) == 0:
        raise EmptyBufferError("cannot measure an empty buffer")
    x = buf.samples
    level = rms(x)
    peak = float(np.max(np.abs(x)))
    clipping = float(np.mean(np.abs(x) >= CLIPPING_LEVEL))

    window, hop = frame_geometry(buf.sample_rate)
    energies = np.square(frame_rms(x, buf.sample_rate))
    hi = energies[energies >= np.percentile(energies, 80)]
    lo = energies[energies <= np.percentile(energies, 20)]
    hi_mean = float(np.mean(hi)) if len(hi) else 0.0
    lo_mean = float(np.mean(lo)) if len(lo) else 0.0
    if hi_mean <= 0.0:
        snr = 0.0
    elif lo_mean <= 0.0:
        snr = -DBFS_FLOOR
    else:
        snr = float(np.clip(10.0 * math.log10(hi_mean / lo_mean), DBFS_FLOOR, -DBFS_FLOOR))

    threshold = 10.0 ** (SILENCE_REPORT_THRESHOLD_DBFS / 20.0)
    levels = frame_rms(x, buf.sample_rate)
    loud = np.flatnonzero(levels >= threshold)
    if len(loud) == 0:
        leading = trailing = buf.duration_s
    else:
        leading = int(loud[0]) * hop / buf.sample_rate
        trailing = max(0, len(x) - (int(loud[-1]) * hop + window)) / buf.sample_rate
    return AudioQualityReport(
        duration_s=buf.duration_s,
        rms_dbfs=dbfs(level),
        peak_dbfs=dbfs(peak),
        clipping_ratio=clipping,
        snr_db=snr,
        leading_silence_s=leading,
        trailing_silence_s=trailing,
    )
