import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prosodia.errors import NonPositiveFrequency, NoVoicedFrames
from prosodia.scales import (
    INTERVALS,
    JUST_RATIOS,
    SEMITONE_RATIO,
    chroma_analyze,
    chroma_from_means,
    hz_to_semitones,
    nearest_interval,
    ratio_to_semitones,
    semitones_to_hz,
    semitones_to_ratio,
)
from prosodia.signal import F0Track


def test_semitone_constant():
    assert SEMITONE_RATIO == pytest.approx(1.0595, abs=1e-4)


def test_minor_third_ratio_identities():
    r3 = semitones_to_ratio(3)
    assert r3 == pytest.approx(1.189, abs=1e-3)
    assert r3 ** 4 == pytest.approx(2.0, abs=1e-9)
    assert SEMITONE_RATIO ** 3 == pytest.approx(r3, abs=1e-9)
    assert semitones_to_ratio(12) == pytest.approx(2.0)
    assert JUST_RATIOS["minor_third_just"] == 1.2


def test_base_conversions():
    assert hz_to_semitones(100) == pytest.approx(12.0)
    assert hz_to_semitones(50) == 0.0
    assert semitones_to_hz(24) == pytest.approx(200.0)
    assert hz_to_semitones(440, base=220) == pytest.approx(12.0)


def test_non_positive_rejected():
    for bad in (0, -1):
        with pytest.raises(NonPositiveFrequency):
            hz_to_semitones(bad)
        with pytest.raises(NonPositiveFrequency):
            ratio_to_semitones(bad)
        with pytest.raises(NonPositiveFrequency):
            chroma_from_means(bad, 100)


@given(st.floats(1, 5000), st.floats(10, 500))
def test_round_trip(f, base):
    assert semitones_to_hz(hz_to_semitones(f, base), base) == pytest.approx(f, rel=1e-12)


@given(st.floats(1, 5000), st.floats(10, 500))
def test_ratio_inverse(f, base):
    assert semitones_to_ratio(hz_to_semitones(f, base)) == pytest.approx(f / base, rel=1e-9)


@given(st.floats(20, 2000), st.floats(20, 2000), st.floats(0.1, 10))
def test_transposition_invariance(f1, f2, k):
    a = chroma_from_means(f1, f2)
    b = chroma_from_means(k * f1, k * f2)
    assert b.semitone_distance == pytest.approx(a.semitone_distance, abs=1e-9)
    assert b.ratio == pytest.approx(a.ratio, rel=1e-12)


@pytest.mark.parametrize("f1,f2,ratio", [(212, 177, 1.198), (201, 168, 1.196),
                                         (240, 196, 1.224), (230, 197, 1.168)])
def test_chanted_contour_means(f1, f2, ratio):
    rep = chroma_from_means(f1, f2)
    assert rep.ratio == pytest.approx(ratio, abs=1e-3)
    assert rep.nearest_interval == "minor_third"


def test_nearest_interval_ties_and_cents():
    assert nearest_interval(4.0) == ("minor_third", pytest.approx(100.0))
    assert nearest_interval(8.0)[0] == "fifth"
    assert nearest_interval(3.2) == ("minor_third", pytest.approx(20.0))


def test_rising_step_keeps_sign():
    rep = chroma_from_means(177, 212)
    assert rep.semitone_distance < 0
    assert rep.nearest_interval == "minor_third"
    assert rep.deviation_cents == pytest.approx(
        chroma_from_means(212, 177).deviation_cents)


def test_chroma_analyze_from_track():
    hi, lo = 240.0, 240.0 / semitones_to_ratio(3)
    frames = [hi] * 30 + [None] * 5 + [lo] * 30
    tr = F0Track(0.0, 0.01, tuple(frames))
    rep = chroma_analyze(tr, (0.0, 0.29), (0.35, 0.64))
    assert rep.nearest_interval == "minor_third"
    assert rep.deviation_cents == pytest.approx(0, abs=1e-6)
    assert rep.semitone_distance == pytest.approx(3.0)
    with pytest.raises(NoVoicedFrames):
        chroma_analyze(tr, (0.0, 0.29), (0.30, 0.34))


def test_table_is_tempered():
    assert all(v == int(v) for v in INTERVALS.values())
    assert math.isclose(semitones_to_ratio(INTERVALS["octave"]), 2.0)
