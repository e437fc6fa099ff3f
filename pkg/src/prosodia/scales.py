"""Tempered-semitone conversions and musical-interval reading of two-level contours."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Mapping

from .errors import NonPositiveFrequency, NoVoicedFrames
from .signal import F0Track

# tempered intervals in semitones
INTERVALS: dict[str, float] = {
    "unison": 0,
    "minor_third": 3,
    "fourth": 5,
    "fifth": 7,
    "sixth": 9,
    "octave": 12,
}
# just-intonation reference ratios (reporting only; all conversions are tempered)
JUST_RATIOS: dict[str, float] = {"minor_third_just": 6 / 5}

SEMITONE_RATIO = 2 ** (1 / 12)


def hz_to_semitones(f: float, base: float = 50.0) -> float:
    if f <= 0 or base <= 0:
        raise NonPositiveFrequency(f"frequencies must be positive (got {f}, base {base})")
    return 12.0 * math.log2(f / base)


def semitones_to_hz(st: float, base: float = 50.0) -> float:
    if base <= 0:
        raise NonPositiveFrequency(f"base must be positive, got {base}")
    return base * semitones_to_ratio(st)


def semitones_to_ratio(st: float) -> float:
    return 2.0 ** (st / 12.0)


def ratio_to_semitones(ratio: float) -> float:
    if ratio <= 0:
        raise NonPositiveFrequency(f"ratio must be positive, got {ratio}")
    return 12.0 * math.log2(ratio)


def nearest_interval(semitones: float,
                     table: Mapping[str, float] = INTERVALS) -> tuple[str, float]:
    """(name, deviation in cents) of the closest table entry; ties go to the smaller interval."""
    name = min(table, key=lambda k: (abs(semitones - table[k]), table[k]))
    return name, 100.0 * (semitones - table[name])


@dataclass(frozen=True)
class ChromaReport:
    f0_1_mean: float
    f0_2_mean: float
    ratio: float
    semitone_distance: float
    nearest_interval: str
    deviation_cents: float

    def to_dict(self) -> dict:
        return {
            "f0_1_mean": self.f0_1_mean,
            "f0_2_mean": self.f0_2_mean,
            "ratio": self.ratio,
            "semitone_distance": self.semitone_distance,
            "nearest_interval": self.nearest_interval,
            "deviation_cents": self.deviation_cents,
        }


def chroma_from_means(f1: float, f2: float,
                      table: Mapping[str, float] = INTERVALS) -> ChromaReport:
    """Interval between two level means, f1 over f2.

    A rising step (f1 < f2) is classified by its size: ``semitone_distance``
    keeps the sign, ``deviation_cents`` is measured on the magnitude.
    """
    if f1 <= 0 or f2 <= 0:
        raise NonPositiveFrequency(f"means must be positive (got {f1}, {f2})")
    ratio = f1 / f2
    st = ratio_to_semitones(ratio)
    name, dev = nearest_interval(abs(st), table)
    return ChromaReport(f1, f2, ratio, st, name, dev)


def _span_mean(track: F0Track, span: tuple[float, float], which: str) -> float:
    vals = [v for _, v in track.voiced_points(*span)]
    if not vals:
        raise NoVoicedFrames(f"{which} [{span[0]}, {span[1]}] contains no voiced frames")
    return statistics.fmean(vals)


def chroma_analyze(track: F0Track, span1: tuple[float, float], span2: tuple[float, float],
                   table: Mapping[str, float] = INTERVALS) -> ChromaReport:
    """Compare mean F0 over two time spans (e.g. the two levels of a chanted call)."""
    m1 = _span_mean(track, span1, "span1")
    m2 = _span_mean(track, span2, "span2")
    return chroma_from_means(m1, m2, table)
