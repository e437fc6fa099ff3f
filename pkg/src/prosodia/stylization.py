"""Least-squares stylisation of F0 tracks.

Polynomials are fitted in normalized time: a model over domain ``[t0, t1]``
uses ``x = (t - t0) / (t1 - t0)``, so ``x`` runs from 0 to 1. Coefficients are
stored lowest order first and refer to ``x``, not to seconds.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateAbscissa,
    EvenWidth,
    InsufficientPoints,
    NoVoicedFrames,
    NumericalFailure,
    OutsideDomain,
)
from .signal import F0Track

NORMALIZATION = "x = (t - t0) / (t1 - t0); coefficients lowest order first"

# relative condition number above which a fit is refused
_MAX_COND = 1e12
_DOMAIN_TOL = 1e-9


@dataclass(frozen=True)
class LinearModel:
    a: float  # intercept: value at abscissa 0
    m: float  # slope per abscissa unit
    sd_residual: float

    def __call__(self, t):
        return self.a + self.m * np.asarray(t, dtype=float)


def linear_fit(points: Sequence[tuple[float, float]]) -> LinearModel:
    """Simple linear regression y = a + m t.

    ``sd_residual`` is the sample (N-1) standard deviation of the residuals.
    """
    if len(points) < 2:
        raise InsufficientPoints(f"linear fit needs >= 2 points, got {len(points)}")
    t = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    tm, ym = t.mean(), y.mean()
    sxx = float(((t - tm) ** 2).sum())
    if sxx == 0.0:
        raise DegenerateAbscissa("all abscissae are equal")
    m = float(((t - tm) * (y - ym)).sum()) / sxx
    a = ym - m * tm
    r = y - (a + m * t)
    return LinearModel(float(a), m, float(np.std(r, ddof=1)))


def track_linear_fit(track: F0Track) -> LinearModel:
    """Linear fit of the voiced frames against frame number (slope in Hz/frame)."""
    pts = [(k, v) for k, v in enumerate(track.frames) if v is not None]
    if not pts:
        raise NoVoicedFrames("track has no voiced frames")
    return linear_fit(pts)


@dataclass(frozen=True)
class PolyModel:
    domain: tuple[float, float]
    degree: int
    coeffs: tuple[float, ...]
    rmse: float

    def __post_init__(self):
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) != self.degree + 1:
            raise ValueError("coeffs length must be degree + 1")
        if self.rmse < 0:
            raise ValueError("rmse must be non-negative")

    @property
    def span(self) -> float:
        t0, t1 = self.domain
        return (t1 - t0) or 1.0

    def normalize(self, t):
        return (np.asarray(t, dtype=float) - self.domain[0]) / self.span

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        t0, t1 = self.domain
        if np.any(t_arr < t0 - _DOMAIN_TOL) or np.any(t_arr > t1 + _DOMAIN_TOL):
            raise OutsideDomain(f"evaluation outside model domain [{t0}, {t1}]")
        x = self.normalize(t_arr)
        # Horner, highest order first
        acc = np.zeros_like(x)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc if acc.ndim else float(acc)

    def to_dict(self) -> dict:
        return {"domain": list(self.domain), "degree": self.degree,
                "coeffs": list(self.coeffs), "rmse": self.rmse}


def poly_fit(points: Sequence[tuple[float, float]], degree: int,
             domain: tuple[float, float] | None = None) -> PolyModel:
    """Least-squares polynomial of the given degree.

    The fit domain defaults to the range of the abscissae.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    t = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    n_distinct = len(np.unique(t))
    if n_distinct < degree + 1:
        raise InsufficientPoints(
            f"degree {degree} needs >= {degree + 1} distinct abscissae, got {n_distinct}")
    if domain is None:
        domain = (float(t.min()), float(t.max()))
    span = (domain[1] - domain[0]) or 1.0
    x = (t - domain[0]) / span

    V = np.vander(x, degree + 1, increasing=True)
    # column equilibration before the SVD-based solve
    scale = np.sqrt((V * V).sum(axis=0))
    scale[scale == 0] = 1.0
    coef, _, rank, sv = np.linalg.lstsq(V / scale, y, rcond=None)
    if rank < degree + 1 or sv[-1] == 0 or sv[0] / sv[-1] > _MAX_COND:
        raise NumericalFailure(f"degree-{degree} system is too ill-conditioned to solve")
    coef = coef / scale
    if not np.all(np.isfinite(coef)):
        raise NumericalFailure("non-finite coefficients")
    resid = y - V @ coef
    rmse = float(math.sqrt(float(np.mean(resid * resid))))
    return PolyModel(domain, degree, tuple(coef.tolist()), rmse)


def default_degree(n_events: int) -> int:
    """Polynomial degree for a domain shaped by ``n_events`` accents (at least 2)."""
    if n_events < 0:
        raise ValueError("n_events must be non-negative")
    return max(2, n_events)


@dataclass(frozen=True)
class StylisationResult:
    global_model: PolyModel
    locals: tuple[PolyModel, ...]
    residual: F0Track
    skipped: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "normalization": NORMALIZATION,
            "global": self.global_model.to_dict(),
            "locals": [m.to_dict() for m in self.locals],
            "skipped": [list(d) for d in self.skipped],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def mps_stylize(track: F0Track, domains: Sequence[tuple[float, float]],
                global_degree: int, local_degree: int) -> StylisationResult:
    """Fit one global model over the whole track plus one local model per domain.

    Only voiced frames enter the fits. Domains with fewer than
    ``local_degree + 1`` voiced frames are listed in ``skipped``. The residual
    track is f0 minus the global model on voiced frames.
    """
    pts = track.voiced_points()
    if not pts:
        raise NoVoicedFrames("track has no voiced frames")
    n = len(track)
    gdomain = (track.time(0), track.time(n - 1))
    gmodel = poly_fit(pts, global_degree, gdomain)

    locals_, skipped = [], []
    for t0, t1 in domains:
        dpts = track.voiced_points(t0, t1)
        if len({p[0] for p in dpts}) < local_degree + 1:
            skipped.append((float(t0), float(t1)))
            continue
        locals_.append(poly_fit(dpts, local_degree, (t0, t1)))

    vals = track.values
    model = gmodel(track.times)
    resid = [None if v is None else float(vals[k] - model[k])
             for k, v in enumerate(track.frames)]
    residual = F0Track(track.start, track.frame_step, tuple(resid))
    return StylisationResult(gmodel, tuple(locals_), residual, tuple(skipped))


def median_filter(track: F0Track, width: int) -> F0Track:
    """Running median over voiced values; unvoiced frames are left alone.

    The window is centred on each frame and shrinks symmetrically so that it
    never reaches past the track edges or into an unvoiced gap. Window sizes
    therefore stay odd and every output value is one of the input values.
    """
    if width < 1 or width % 2 == 0:
        raise EvenWidth(f"median filter width must be a positive odd integer, got {width}")
    half = width // 2
    frames = track.frames
    out: list[float | None] = list(frames)
    k = 0
    n = len(frames)
    while k < n:
        if frames[k] is None:
            k += 1
            continue
        j = k
        while j < n and frames[j] is not None:
            j += 1
        run = frames[k:j]
        for i in range(len(run)):
            h = min(half, i, len(run) - 1 - i)
            out[k + i] = statistics.median(run[i - h: i + h + 1])
        k = j
    return track.with_frames(out)
