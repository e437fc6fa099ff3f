import io
import struct
import wave

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prosodia.errors import (
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
from prosodia.signal import (
    F0Params,
    F0Track,
    SampledSignal,
    estimate_f0,
    ingest_f0_csv,
    read_wav,
    synth_periodic,
    track_stats,
    validate_nyquist,
    write_wav,
)


def _wav_bytes(pcm, rate=16000, channels=1, width=2):
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(width)
        w.setframerate(rate)
        w.writeframes(pcm)
    return buf.getvalue()


def test_read_wav_zeros():
    s = read_wav(_wav_bytes(b"\x00\x00" * 16000))
    assert s.sample_rate == 16000
    assert len(s) == 16000
    assert not np.any(s.samples)


def test_read_wav_square_extremes():
    pcm = struct.pack("<8h", *([32767] * 4 + [-32768] * 4))
    s = read_wav(_wav_bytes(pcm))
    assert set(s.samples.tolist()) == {-1.0, 32767 / 32768}
    assert 32767 / 32768 == pytest.approx(0.99997, abs=1e-5)


def test_read_wav_rejects_stereo_and_8bit():
    with pytest.raises(UnsupportedFormat):
        read_wav(_wav_bytes(b"\x00" * 400, channels=2))
    with pytest.raises(UnsupportedFormat):
        read_wav(_wav_bytes(b"\x80" * 400, width=1))


def test_read_wav_rejects_float_format():
    raw = bytearray(_wav_bytes(b"\x00\x00" * 10))
    raw[20:22] = struct.pack("<H", 3)  # IEEE float format tag
    with pytest.raises(UnsupportedFormat):
        read_wav(bytes(raw))


def test_read_wav_corrupt():
    with pytest.raises(CorruptHeader):
        read_wav(b"not a wav file at all")
    with pytest.raises(CorruptHeader):
        read_wav(_wav_bytes(b"\x00\x00" * 10)[:30])


def test_wav_round_trip():
    s = synth_periodic(220, sr=8000, duration=0.1)
    back = read_wav(write_wav(s))
    assert back.sample_rate == 8000
    assert np.max(np.abs(back.samples - s.samples)) <= 1 / 32768


@pytest.mark.parametrize("rate,f,ok", [(44100, 20000, True), (16000, 8000, False),
                                       (16000, 400, True)])
def test_nyquist(rate, f, ok):
    assert validate_nyquist(rate, f) is ok


def _voiced_accuracy(track, truth, tol=2.0):
    v = track.values
    return float(np.mean(np.abs(np.nan_to_num(v, nan=-1e9) - truth) <= tol))


def test_sine_200():
    tr = estimate_f0(synth_periodic(200, shape="sine"))
    assert _voiced_accuracy(tr, 200) >= 0.95
    assert tr.frame_step == 0.01


def test_sawtooth_100_no_octave_error():
    tr = estimate_f0(synth_periodic(100, shape="sawtooth"))
    assert _voiced_accuracy(tr, 100) >= 0.95


def test_silence_unvoiced():
    tr = estimate_f0(SampledSignal(16000, np.zeros(16000)))
    assert tr.voiced_count == 0
    assert len(tr) > 0


def test_white_noise_mostly_unvoiced():
    rng = np.random.default_rng(1)
    tr = estimate_f0(SampledSignal(16000, rng.uniform(-0.5, 0.5, 16000)),
                     F0Params(voicing_threshold=0.5))
    assert tr.voiced_count / len(tr) < 0.2


def test_estimate_preconditions():
    with pytest.raises(NyquistViolation):
        estimate_f0(synth_periodic(100, sr=700), F0Params())
    with pytest.raises(SignalTooShort):
        estimate_f0(synth_periodic(100, duration=0.01))


def test_params_warn_short_window():
    with pytest.warns(UserWarning):
        F0Params(window=0.005)
    with pytest.raises(ValueError):
        F0Params(f_min=300, f_max=200)


@settings(max_examples=25, deadline=None)
@given(st.floats(80, 350), st.sampled_from(["sine", "sawtooth", "square"]))
def test_accuracy_over_range(f, shape):
    tr = estimate_f0(synth_periodic(f, duration=0.3, shape=shape))
    v = tr.values[tr.voiced_mask]
    assert v.size >= 0.95 * len(tr)
    assert np.max(np.abs(v - f)) <= 2.0


@settings(max_examples=15, deadline=None)
@given(st.floats(40, 600), st.floats(0.01, 0.45))
def test_voiced_values_within_search_range(f, amp):
    p = F0Params(f_min=90, f_max=300)
    tr = estimate_f0(synth_periodic(f, duration=0.2, amplitude=amp), p)
    v = tr.values[tr.voiced_mask]
    assert np.all((v >= 90) & (v <= 300))


def test_amplitude_invariance():
    rng = np.random.default_rng(7)
    base = synth_periodic(150, duration=0.5, amplitude=0.2).samples
    noisy = np.clip(base + rng.normal(0, 0.05, base.size), -0.45, 0.45)
    a = estimate_f0(SampledSignal(16000, noisy))
    b = estimate_f0(SampledSignal(16000, 2 * noisy))
    assert [x is None for x in a.frames] == [x is None for x in b.frames]
    np.testing.assert_allclose(a.values[a.voiced_mask], b.values[b.voiced_mask], rtol=1e-9)


def test_ingest_basic():
    tr = ingest_f0_csv("time_s,f0_hz\n0.00,180\n0.01,0\n0.02,190\n")
    assert tr.frames == (180.0, None, 190.0)
    assert tr.frame_step == pytest.approx(0.01)
    assert tr.start == 0.0


def test_ingest_empty_field_is_unvoiced():
    tr = ingest_f0_csv("time_s,f0_hz\n1.0,\n1.5,120\n")
    assert tr.frames == (None, 120.0)
    assert tr.frame_step == pytest.approx(0.5)


def test_ingest_header_only():
    with pytest.raises(MissingFrameStep):
        ingest_f0_csv("time_s,f0_hz\n")
    tr = ingest_f0_csv("time_s,f0_hz\n", step=0.01)
    assert len(tr) == 0 and tr.frame_step == 0.01


def test_ingest_errors():
    with pytest.raises(NonUniformSpacing):
        ingest_f0_csv("time_s,f0_hz\n0.00,1\n0.01,1\n0.025,1\n")
    with pytest.raises(NegativeF0):
        ingest_f0_csv("time_s,f0_hz\n0,-3\n0.01,1\n")
    with pytest.raises(MalformedRow):
        ingest_f0_csv("time_s,f0_hz\n0,abc\n")
    with pytest.raises(MalformedRow):
        ingest_f0_csv("t,f\n0,1\n")
    with pytest.raises(MalformedRow):
        ingest_f0_csv("time_s,f0_hz\n0,1,2\n")


_f0 = st.one_of(st.none(), st.floats(50, 800, allow_nan=False))


@settings(max_examples=100)
@given(st.floats(0, 100), st.sampled_from([0.005, 0.01, 0.02]),
       st.lists(_f0, min_size=2, max_size=60))
def test_csv_round_trip(start, step, frames):
    tr = F0Track(start, step, tuple(frames))
    back = ingest_f0_csv(tr.to_csv())
    assert [x is None for x in back.frames] == [x is None for x in frames]
    for a, b in zip(back.frames, frames):
        if b is not None:
            assert abs(a - b) <= 1e-6
    assert back.frame_step == pytest.approx(step, abs=1e-6)


def test_track_stats():
    s = track_stats(F0Track(0, 0.01, (150,)))
    assert (s.min, s.max, s.mean, s.median) == (150, 150, 150, 150)
    s = track_stats(F0Track(0, 0.01, (100, 200, 300)))
    assert (s.min, s.max, s.mean, s.median) == (100, 300, 200, 200)
    s = track_stats(F0Track(0, 0.01, (100, None, 300)))
    assert (s.mean, s.voiced_count, s.total_count) == (200, 2, 3)
    with pytest.raises(NoVoicedFrames):
        track_stats(F0Track(0, 0.01, (None, None)))
