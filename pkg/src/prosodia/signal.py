"""PCM audio input, F0 tracks, and a normalized-autocorrelation pitch tracker."""

from __future__ import annotations

import csv
import io
import math
import statistics
import warnings
import wave
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    CorruptHeader,
    MalformedRow,
    MissingFrameStep,
    NegativeF0,
    NonUniformSpacing,
    NoVoicedFrames,
    NyquistViolation,
    SignalTooShort,
    UnsupportedFormat,
)

SPACING_TOL = 1e-6  # seconds


@dataclass(frozen=True, eq=False)
class SampledSignal:
    sample_rate: int
    samples: np.ndarray

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if s.size and (s.min() < -1.0 or s.max() > 1.0):
            raise ValueError("samples must lie within [-1, 1]")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class F0Params:
    f_min: float = 70.0
    f_max: float = 400.0
    frame_step: float = 0.01
    window: float = 0.02
    voicing_threshold: float = 0.3

    def __post_init__(self):
        if not 0 < self.f_min < self.f_max:
            raise ValueError(f"need 0 < f_min < f_max, got {self.f_min}, {self.f_max}")
        if self.frame_step <= 0 or self.window <= 0:
            raise ValueError("frame_step and window must be positive")
        if not 0 <= self.voicing_threshold <= 1:
            raise ValueError("voicing_threshold must lie in [0, 1]")
        if self.window < 1.0 / self.f_min:
            warnings.warn(
                f"analysis window {self.window} s is shorter than one period at "
                f"f_min={self.f_min} Hz", stacklevel=2)


@dataclass(frozen=True)
class F0Track:
    """Frame-wise F0 in Hz; ``None`` marks an unvoiced frame.

    Frame ``k`` sits at time ``start + k * frame_step``. ``f_min``/``f_max``
    record the search range of the analysis that produced the track, when known.
    """

    start: float
    frame_step: float
    frames: tuple[float | None, ...] = ()
    f_min: float | None = None
    f_max: float | None = None

    def __post_init__(self):
        if not self.frame_step > 0:
            raise ValueError("frame_step must be positive")
        frames = tuple(None if v is None or (isinstance(v, float) and math.isnan(v))
                       else float(v) for v in self.frames)
        object.__setattr__(self, "frames", frames)

    def __len__(self):
        return len(self.frames)

    def time(self, k: int) -> float:
        return self.start + k * self.frame_step

    @property
    def times(self) -> np.ndarray:
        return self.start + np.arange(len(self.frames)) * self.frame_step

    @property
    def values(self) -> np.ndarray:
        """Frames as floats with NaN for unvoiced."""
        return np.array([np.nan if v is None else v for v in self.frames], dtype=float)

    @property
    def voiced_mask(self) -> np.ndarray:
        return np.array([v is not None for v in self.frames], dtype=bool)

    @property
    def voiced_count(self) -> int:
        return sum(v is not None for v in self.frames)

    def voiced_points(self, t0: float | None = None, t1: float | None = None):
        """(time, f0) pairs of voiced frames, optionally restricted to [t0, t1]."""
        pts = []
        for k, v in enumerate(self.frames):
            if v is None:
                continue
            t = self.time(k)
            if t0 is not None and t < t0 - 1e-9:
                continue
            if t1 is not None and t > t1 + 1e-9:
                continue
            pts.append((t, v))
        return pts

    def with_frames(self, frames: Iterable[float | None]) -> "F0Track":
        return F0Track(self.start, self.frame_step, tuple(frames), self.f_min, self.f_max)

    def shifted(self, dt: float) -> "F0Track":
        return F0Track(self.start + dt, self.frame_step, self.frames, self.f_min, self.f_max)

    def to_csv(self) -> str:
        """``time_s,f0_hz`` text; unvoiced frames get an empty f0 field."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time_s", "f0_hz"])
        for k, v in enumerate(self.frames):
            w.writerow([repr(round(self.time(k), 9)), "" if v is None else repr(v)])
        return buf.getvalue()


# --------------------------------------------------------------------------
# WAV


def read_wav(content: bytes) -> SampledSignal:
    """Decode a mono 16-bit PCM RIFF/WAVE file, scaling samples by 1/32768."""
    if len(content) < 12 or content[:4] != b"RIFF" or content[8:12] != b"WAVE":
        raise CorruptHeader("not a RIFF/WAVE file")
    try:
        with wave.open(io.BytesIO(content), "rb") as w:
            channels, width, rate = w.getnchannels(), w.getsampwidth(), w.getframerate()
            nframes = w.getnframes()
            raw = w.readframes(nframes)
    except wave.Error as exc:
        if "unknown format" in str(exc):
            raise UnsupportedFormat(f"non-PCM WAV ({exc})") from None
        raise CorruptHeader(str(exc)) from None
    except EOFError:
        raise CorruptHeader("truncated WAV header") from None
    if channels != 1:
        raise UnsupportedFormat(f"{channels} channels; only mono is supported")
    if width != 2:
        raise UnsupportedFormat(f"{8 * width}-bit samples; only 16-bit PCM is supported")
    if rate <= 0:
        raise CorruptHeader(f"sample rate {rate}")
    if len(raw) % 2:
        raw = raw[:-1]
    pcm = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return SampledSignal(rate, pcm)


def write_wav(sig: SampledSignal) -> bytes:
    """Encode as mono 16-bit PCM (values clipped to the int16 range)."""
    pcm = np.clip(np.round(np.asarray(sig.samples) * 32768.0), -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(sig.sample_rate))
        w.writeframes(pcm.tobytes())
    return buf.getvalue()


def validate_nyquist(sample_rate: float, f_signal_max: float) -> bool:
    """True iff sampling is strictly faster than twice the highest frequency."""
    if sample_rate <= 0 or f_signal_max <= 0:
        raise ValueError("sample_rate and f_signal_max must be positive")
    return sample_rate > 2 * f_signal_max


# --------------------------------------------------------------------------
# F0 estimation

# A later peak must beat the earliest candidate by this factor to win;
# keeps period multiples (sub-octaves) from being chosen on periodic input.
_OCTAVE_TOLERANCE = 0.9


def estimate_f0(s: SampledSignal, p: F0Params = F0Params()) -> F0Track:
    """Frame-wise F0 by normalized cross-correlation of each window with its lagged copy.

    For frame ``k`` the window of ``round(window * sr)`` samples starting at
    ``round(k * frame_step * sr)`` is correlated against the same-length
    segment ``lag`` samples later, for lags covering ``[1/f_max, 1/f_min]``.
    The frame is voiced iff the chosen peak exceeds ``voicing_threshold``;
    its time stamp is the window centre.
    """
    sr = s.sample_rate
    if not validate_nyquist(sr, p.f_max):
        raise NyquistViolation(f"sample rate {sr} Hz cannot represent f_max={p.f_max} Hz")
    x = np.asarray(s.samples, dtype=np.float64)
    n_win = max(2, int(round(p.window * sr)))
    lag_lo = max(1, int(math.floor(sr / p.f_max)))
    lag_hi = int(math.ceil(sr / p.f_min))
    need = n_win + lag_hi + 1
    if len(x) < need:
        raise SignalTooShort(
            f"{len(x)} samples; need at least {need} (window plus longest lag)")
    hop = p.frame_step * sr
    n_frames = int(math.floor((len(x) - need) / hop)) + 1

    frames: list[float | None] = []
    for k in range(n_frames):
        n0 = int(round(k * hop))
        frames.append(_frame_f0(x[n0:n0 + need], n_win, lag_lo, lag_hi, sr, p))
    start = n_win / 2.0 / sr
    return F0Track(start, p.frame_step, tuple(frames), p.f_min, p.f_max)


def _nccf(seg: np.ndarray, n_win: int, lag_hi: int) -> np.ndarray:
    """Normalized correlation of seg[:n_win] with seg[lag:lag+n_win], lag = 0..lag_hi+1."""
    ref = seg[:n_win]
    lagged = sliding_window_view(seg, n_win)[: lag_hi + 2]
    num = lagged @ ref
    e0 = float(ref @ ref)
    csum = np.concatenate(([0.0], np.cumsum(seg * seg)))
    el = csum[n_win: n_win + lag_hi + 2] - csum[: lag_hi + 2]
    den = np.sqrt(e0 * el)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(den > 0, num / den, 0.0)
    return r


def _frame_f0(seg, n_win, lag_lo, lag_hi, sr, p: F0Params):
    ref = seg[:n_win]
    # digital silence / denormal noise floor
    if float(ref @ ref) <= 1e-20 * n_win:
        return None
    r = _nccf(seg, n_win, lag_hi)
    lags = np.arange(max(lag_lo, 1), lag_hi + 1)
    inner = r[lags]
    is_peak = (inner > r[lags - 1]) & (inner >= r[lags + 1])
    peaks = lags[is_peak]
    if peaks.size == 0:
        return None
    best_val = r[peaks].max()
    if best_val <= p.voicing_threshold:
        return None
    # earliest peak within tolerance of the global maximum
    lag = int(peaks[np.argmax(r[peaks] >= _OCTAVE_TOLERANCE * best_val)])
    a, b, c = r[lag - 1], r[lag], r[lag + 1]
    denom = a - 2 * b + c
    delta = 0.5 * (a - c) / denom if denom < 0 else 0.0
    delta = max(-0.5, min(0.5, delta))
    f0 = sr / (lag + delta)
    return min(max(f0, p.f_min), p.f_max)


# --------------------------------------------------------------------------
# CSV ingest and statistics


def ingest_f0_csv(content: str, step: float | None = None) -> F0Track:
    """Read a ``time_s,f0_hz`` CSV; empty or 0 f0 marks an unvoiced frame.

    ``step`` is required when the file has fewer than two rows, and is
    checked against the row spacing otherwise.
    """
    rows = list(csv.reader(io.StringIO(content.lstrip("﻿"))))
    rows = [(i, r) for i, r in enumerate(rows, start=1) if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0][1]] != ["time_s", "f0_hz"]:
        raise MalformedRow("line 1: expected header 'time_s,f0_hz'")
    times, values = [], []
    for lineno, row in rows[1:]:
        if len(row) != 2:
            raise MalformedRow(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            t = float(row[0])
            f = float(row[1]) if row[1].strip() else 0.0
        except ValueError:
            raise MalformedRow(f"line {lineno}: non-numeric field in {row!r}") from None
        if not (math.isfinite(t) and math.isfinite(f)):
            raise MalformedRow(f"line {lineno}: non-finite value in {row!r}")
        if f < 0:
            raise NegativeF0(f"line {lineno}: negative f0 {f}")
        times.append(t)
        values.append(None if f == 0 else f)

    if len(times) < 2:
        if step is None:
            raise MissingFrameStep(
                "cannot infer frame step from fewer than 2 rows; supply a step override")
        return F0Track(times[0] if times else 0.0, step, tuple(values))

    inferred = (times[-1] - times[0]) / (len(times) - 1)
    if inferred <= 0:
        raise NonUniformSpacing("times must be strictly ascending")
    for k, t in enumerate(times):
        if abs(t - (times[0] + k * inferred)) > SPACING_TOL:
            raise NonUniformSpacing(
                f"row {k + 1} at {t} s breaks uniform spacing of {inferred:.6g} s")
    if step is not None and abs(step - inferred) > SPACING_TOL:
        raise NonUniformSpacing(f"rows are spaced {inferred:.6g} s, not the given step {step}")
    return F0Track(times[0], inferred, tuple(values))


@dataclass(frozen=True)
class TrackStats:
    min: float
    max: float
    mean: float
    median: float
    voiced_count: int
    total_count: int


def track_stats(t: F0Track) -> TrackStats:
    v = [x for x in t.frames if x is not None]
    if not v:
        raise NoVoicedFrames("track has no voiced frames")
    return TrackStats(min(v), max(v), statistics.fmean(v), statistics.median(v), len(v), len(t))


def synth_periodic(freq: float, sr: int = 16000, duration: float = 1.0,
                   amplitude: float = 0.5, shape: str = "sine") -> SampledSignal:
    """Test/demo signal generator: sine, sawtooth or square."""
    t = np.arange(int(round(sr * duration))) / sr
    phase = (freq * t) % 1.0
    if shape == "sine":
        y = np.sin(2 * np.pi * freq * t)
    elif shape == "sawtooth":
        y = 2.0 * phase - 1.0
    elif shape == "square":
        y = np.where(phase < 0.5, 1.0, -1.0)
    else:
        raise ValueError(f"unknown shape {shape!r}")
    return SampledSignal(sr, amplitude * y)
