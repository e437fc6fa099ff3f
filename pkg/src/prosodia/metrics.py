"""Timing-irregularity metrics over interval-duration sequences (ms)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyGroup,
    EmptyInput,
    InsufficientData,
    NonPositiveDuration,
    SequenceShorterThanWindow,
    ZeroMean,
)

SAMPLE = "sample"
POPULATION = "population"

# quartile methods by name -> numpy.quantile method
QUARTILE_METHODS = {"inclusive": "linear", "exclusive": "weibull"}


def _arr(durations, minimum=2) -> np.ndarray:
    d = np.asarray(list(durations), dtype=float)
    if d.size < minimum:
        raise InsufficientData(d.size, minimum)
    return d


def _ddof(denominator: str) -> int:
    if denominator == SAMPLE:
        return 1
    if denominator == POPULATION:
        return 0
    raise ValueError(f"sd denominator must be 'sample' or 'population', not {denominator!r}")


def sd(durations: Sequence[float], denominator: str = SAMPLE) -> float:
    """Standard deviation; N-1 denominator unless ``denominator='population'``."""
    d = _arr(durations)
    return float(np.std(d, ddof=_ddof(denominator)))


def coeff_var(durations: Sequence[float], denominator: str = SAMPLE) -> float:
    """100 * sd / mean."""
    d = _arr(durations)
    mu = float(d.mean())
    if mu == 0:
        raise ZeroMean("mean duration is zero")
    return 100.0 * float(np.std(d, ddof=_ddof(denominator))) / mu


def rpvi(durations: Sequence[float]) -> float:
    d = _arr(durations)
    return float(np.abs(np.diff(d)).mean())


def npvi(durations: Sequence[float]) -> float:
    d = _arr(durations)
    if np.any(d <= 0):
        raise NonPositiveDuration("nPVI needs strictly positive durations")
    pair_mean = (d[:-1] + d[1:]) / 2.0
    return 100.0 * float((np.abs(np.diff(d)) / pair_mean).mean())


def vi_deterding(durations: Sequence[float]) -> float:
    """Pairwise differences normalised by the mean of the whole sequence, x100."""
    d = _arr(durations)
    mu = float(d.mean())
    if mu <= 0:
        raise ZeroMean("mean duration must be positive")
    return 100.0 * float(np.abs(np.diff(d)).mean()) / mu


@dataclass(frozen=True)
class MetricsReport:
    n: int
    mean: float
    median: float
    min: float
    max: float
    sd: float
    coeff_var: float
    rpvi: float
    npvi: float
    vi_det: float

    def to_dict(self) -> dict:
        return asdict(self)


def metrics_report(durations: Sequence[float], denominator: str = SAMPLE) -> MetricsReport:
    d = _arr(durations)
    return MetricsReport(
        n=int(d.size),
        mean=float(d.mean()),
        median=float(np.median(d)),
        min=float(d.min()),
        max=float(d.max()),
        sd=sd(d, denominator),
        coeff_var=coeff_var(d, denominator),
        rpvi=rpvi(d),
        npvi=npvi(d),
        vi_det=vi_deterding(d),
    )


@dataclass(frozen=True)
class WindowSeries:
    window: int
    step: int
    values: tuple[float, ...]
    sorted_values: tuple[float, ...]
    mean: float
    sd: float | None        # None when there is a single window
    coeff_var: float | None  # None when sd is None or the mean is zero

    @property
    def summary(self) -> dict:
        return {"mean": self.mean, "sd": self.sd, "coeff_var": self.coeff_var}

    def to_dict(self) -> dict:
        return {"window": self.window, "step": self.step, "values": list(self.values),
                "sorted_values": list(self.sorted_values), "summary": self.summary}


def moving_npvi(durations: Sequence[float], window: int = 5, step: int = 1,
                denominator: str = SAMPLE) -> WindowSeries:
    """nPVI of each ``window``-long stretch, advancing ``step`` intervals at a time."""
    if window < 2:
        raise ValueError("window must be >= 2")
    if step < 1:
        raise ValueError("step must be >= 1")
    d = [float(x) for x in durations]
    if len(d) < window:
        raise SequenceShorterThanWindow(f"sequence length {len(d)} < window {window}")
    vals = tuple(npvi(d[i:i + window]) for i in range(0, len(d) - window + 1, step))
    mean = math.fsum(vals) / len(vals)
    if len(vals) > 1:
        s = float(np.std(vals, ddof=_ddof(denominator)))
        cv = 100.0 * s / mean if mean != 0 else None
    else:
        s, cv = None, None
    return WindowSeries(window, step, vals, tuple(sorted(vals)), mean, s, cv)


@dataclass(frozen=True)
class CategoryStats:
    n: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float


@dataclass(frozen=True)
class BoxStats:
    categories: dict[str, CategoryStats]
    values: dict[str, tuple[float, ...]]  # raw data per category, for dot columns

    def __len__(self):
        return len(self.categories)

    def to_csv(self) -> str:
        lines = ["category,n,min,q1,median,q3,max,mean"]
        for cat, s in self.categories.items():
            cell = cat if not any(c in cat for c in ',"\n') else '"' + cat.replace('"', '""') + '"'
            lines.append(",".join([cell, str(s.n)] + [repr(float(v)) for v in
                                  (s.min, s.q1, s.median, s.q3, s.max, s.mean)]))
        return "\n".join(lines) + "\n"


def box_stats(groups: Mapping[str, Sequence[float]], quartile_method: str = "inclusive") -> BoxStats:
    """Five-number summary plus mean per category (linear-interpolated quartiles)."""
    try:
        method = QUARTILE_METHODS[quartile_method]
    except KeyError:
        raise ValueError(f"unknown quartile method {quartile_method!r}") from None
    cats, raw = {}, {}
    for name, vals in groups.items():
        v = np.asarray(list(vals), dtype=float)
        if v.size == 0:
            raise EmptyGroup(f"category {name!r} has no values")
        q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75], method=method)
        lo, hi = float(v.min()), float(v.max())
        # the exclusive method can extrapolate past the data on small groups
        cats[name] = CategoryStats(int(v.size), lo, float(np.clip(q1, lo, hi)), float(med),
                                   float(np.clip(q3, lo, hi)), hi, float(v.mean()))
        raw[name] = tuple(float(x) for x in v)
    return BoxStats(cats, raw)


@dataclass(frozen=True)
class SpeechRate:
    median_rate: float  # intervals per second
    median_duration: float
    mean_duration: float
    min: float
    max: float


def speech_rate(durations: Sequence[float]) -> SpeechRate:
    d = np.asarray(list(durations), dtype=float)
    if d.size == 0:
        raise EmptyInput("no durations")
    med = float(np.median(d))
    if med <= 0:
        raise NonPositiveDuration("median duration must be positive")
    return SpeechRate(1000.0 / med, med, float(d.mean()), float(d.min()), float(d.max()))
