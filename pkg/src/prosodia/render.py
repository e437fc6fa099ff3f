"""Deterministic SVG plots: F0 traces with statistics and models, box plots,
and moving-window series.

Vertical mapping is linear in the plotted unit. The data range ``[lo, hi]`` is
padded by 5% of its extent on each side (by 1 unit when the extent is zero) and
mapped onto the panel, so every data value lands strictly inside it. Numbers are
written with two decimals; nothing environment-dependent reaches the output, so
equal inputs give byte-identical documents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .annotation import Tier
from .errors import EmptySeries, EmptyStats, NoVoicedFrames
from .metrics import BoxStats, WindowSeries
from .signal import F0Track, SampledSignal, track_stats
from .stylization import PolyModel

PAD = 0.05
MAX_WAVE_SEGMENTS = 2000

TRACE = "#000000"
MODEL = "#444444"
RESIDUAL = "#999999"
SORTED = "#888888"
GRID = "#cccccc"

DASHED = "6 4"
DOTTED = "1 3"
THICK_DASHED = "10 6"
THIN_DASHED = "4 3"

MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60.0, 20.0, 30.0, 30.0
GAP = 10.0


def _n(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def _label_num(x: float) -> str:
    return f"{x:.0f}" if abs(x - round(x)) < 1e-9 else f"{x:.4g}"


class YMap:
    """Linear value -> pixel mapping with 5% padding."""

    def __init__(self, lo: float, hi: float, top: float, bottom: float):
        extent = hi - lo
        pad = PAD * extent if extent > 0 else 1.0
        self.lo, self.hi = lo - pad, hi + pad
        self.top, self.bottom = top, bottom

    def __call__(self, v: float) -> float:
        return self.top + (self.hi - v) / (self.hi - self.lo) * (self.bottom - self.top)


class XMap:
    def __init__(self, lo: float, hi: float, left: float, right: float):
        self.lo, self.hi, self.left, self.right = lo, hi, left, right

    def __call__(self, v: float) -> float:
        if self.hi == self.lo:
            return (self.left + self.right) / 2
        return self.left + (v - self.lo) / (self.hi - self.lo) * (self.right - self.left)


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 10))
        v += step
    return ticks


class _Doc:
    def __init__(self, width: float, height: float, desc: str = ""):
        self.width, self.height = width, height
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_n(width)}" '
            f'height="{_n(height)}" viewBox="0 0 {_n(width)} {_n(height)}">',
        ]
        if desc:
            self.parts.append(f"<desc>{escape(desc)}</desc>")
        self.parts.append(f'<rect class="background" x="0" y="0" width="{_n(width)}" '
                          f'height="{_n(height)}" fill="#ffffff"/>')

    def add(self, s: str):
        self.parts.append(s)

    def line(self, x1, y1, x2, y2, cls, stroke="#000000", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.add(f'<line class="{cls}" x1="{_n(x1)}" y1="{_n(y1)}" x2="{_n(x2)}" y2="{_n(y2)}" '
                 f'stroke="{stroke}" stroke-width="{_n(width)}"{d}/>')

    def polyline(self, pts, cls, stroke="#000000", width=1.0, dash=None):
        if len(pts) == 1:
            x, y = pts[0]
            self.add(f'<circle class="{cls}" cx="{_n(x)}" cy="{_n(y)}" r="{_n(max(width, 1.0))}" '
                     f'fill="{stroke}"/>')
            return
        d = f' stroke-dasharray="{dash}"' if dash else ""
        coords = " ".join(f"{_n(x)},{_n(y)}" for x, y in pts)
        self.add(f'<polyline class="{cls}" points="{coords}" fill="none" stroke="{stroke}" '
                 f'stroke-width="{_n(width)}"{d}/>')

    def text(self, x, y, s, cls="label", anchor="middle", size=11):
        self.add(f'<text class="{cls}" x="{_n(x)}" y="{_n(y)}" font-family="sans-serif" '
                 f'font-size="{size}" text-anchor="{anchor}">{escape(s)}</text>')

    def close(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _y_axis(doc: _Doc, ymap: YMap, left: float, right: float, unit: str):
    doc.line(left, ymap.top, left, ymap.bottom, "axis")
    for v in nice_ticks(ymap.lo, ymap.hi, 5):
        y = ymap(v)
        doc.line(left - 4, y, left, y, "ytick")
        doc.text(left - 6, y + 4, _label_num(v), "ytick-label", anchor="end", size=10)
    doc.text(12, (ymap.top + ymap.bottom) / 2, unit, "axis-title", anchor="middle", size=10)


# --------------------------------------------------------------------------
# F0 track plot


@dataclass(frozen=True, eq=False)
class PlotSpec:
    track: F0Track
    width: int = 1000
    height: int = 400
    global_model: PolyModel | None = None
    local_models: Sequence[PolyModel] = field(default_factory=tuple)
    residual: F0Track | None = None
    annotation: Tier | None = None
    waveform: SampledSignal | None = None
    stat_lines: bool = True
    title: str = ""


def _runs(track: F0Track):
    """Index runs of consecutive voiced frames."""
    run = []
    for k, v in enumerate(track.frames):
        if v is None:
            if run:
                yield run
            run = []
        else:
            run.append(k)
    if run:
        yield run


def _model_curve(model: PolyModel, track: F0Track):
    """(frame coordinate, value) samples of a model at the frame times inside its
    domain, plus the exact domain ends so short domains still draw."""
    t0, t1 = model.domain
    ts = sorted({t0, t1, *(track.time(k) for k in range(len(track))
                           if t0 - 1e-9 <= track.time(k) <= t1 + 1e-9)})
    vals = np.atleast_1d(model(np.array(ts)))
    return [((t - track.start) / track.frame_step, float(v)) for t, v in zip(ts, vals)]


def plot_track(spec: PlotSpec) -> str:
    track = spec.track
    if track.voiced_count == 0:
        raise NoVoicedFrames("cannot plot a track with no voiced frames")
    stats = track_stats(track)
    W, H = float(spec.width), float(spec.height)
    left, right = MARGIN_L, W - MARGIN_R
    y = MARGIN_T
    bottom_all = H - MARGIN_B

    tier_h = 40.0 if spec.annotation is not None else 0.0
    wave_h = 50.0 if spec.waveform is not None else 0.0
    fixed = sum(h + GAP for h in (tier_h, wave_h) if h) + (12.0 if tier_h else 0.0)
    avail = bottom_all - y - fixed
    resid_h = 0.3 * avail if spec.residual is not None else 0.0
    f0_h = avail - (resid_h + GAP if resid_h else 0.0)

    n = len(track)
    xmap = XMap(0, n - 1, left, right)

    lo, hi = stats.min, stats.max
    gcurve = _model_curve(spec.global_model, track) if spec.global_model else None
    lcurves = [_model_curve(m, track) for m in spec.local_models]
    model_vals = [v for c in ([gcurve] if gcurve else []) + lcurves for _, v in c]
    if model_vals:
        lo, hi = min(lo, min(model_vals)), max(hi, max(model_vals))
    ymap = YMap(lo, hi, y, y + f0_h)

    desc = ("F0 plot. x: frame number (frame step "
            f"{_label_num(track.frame_step * 1000)} ms); y: Hz, linear, padded 5% of range. "
            "Lines: max/min solid, mean dashed, median dotted; global model thick dashed; "
            "local models dotted; residual thin dashed about zero.")
    doc = _Doc(W, H, desc)
    if spec.title:
        doc.text(W / 2, 18, spec.title, "title", size=13)

    _y_axis(doc, ymap, left, right, "Hz")
    doc.line(left, ymap.bottom, right, ymap.bottom, "axis")

    if spec.stat_lines:
        for cls, v, dash in (("stat-max", stats.max, None), ("stat-min", stats.min, None),
                             ("stat-mean", stats.mean, DASHED),
                             ("stat-median", stats.median, DOTTED)):
            yy = ymap(v)
            doc.line(left, yy, right, yy, cls, stroke=MODEL, width=1.0, dash=dash)
            doc.text(right - 2, yy - 3, f"{cls[5:]} {_label_num(round(v))} Hz",
                     cls + "-label", anchor="end", size=9)

    for run in _runs(track):
        pts = [(xmap(k), ymap(track.frames[k])) for k in run]
        doc.polyline(pts, "f0", stroke=TRACE, width=1.5)

    if gcurve:
        doc.polyline([(xmap(f), ymap(v)) for f, v in gcurve], "model-global",
                     stroke=MODEL, width=3.0, dash=THICK_DASHED)
    for c in lcurves:
        doc.polyline([(xmap(f), ymap(v)) for f, v in c], "model-local",
                     stroke=MODEL, width=1.0, dash=DOTTED)

    y = ymap.bottom + GAP
    if spec.residual is not None:
        r = spec.residual
        rv = [abs(v) for v in r.frames if v is not None]
        amp = max(rv) if rv else 0.0
        rmap = YMap(-amp, amp, y, y + resid_h)
        rx = XMap(0, max(len(r) - 1, 0), left, right)
        doc.line(left, rmap(0.0), right, rmap(0.0), "zero-line", stroke=GRID)
        doc.text(left - 6, rmap(0.0) + 4, "0", "ytick-label", anchor="end", size=10)
        for run in _runs(r):
            doc.polyline([(rx(k), rmap(r.frames[k])) for k in run], "residual",
                         stroke=RESIDUAL, width=1.0, dash=THIN_DASHED)
        y += resid_h + GAP

    # frame-number axis under the last data panel
    axis_y = y - GAP
    for tk in nice_ticks(0, n - 1, 10):
        xx = xmap(tk)
        doc.line(xx, axis_y, xx, axis_y + 4, "xtick")
        doc.text(xx, axis_y + 14, _label_num(tk), "xtick-label", size=10)

    if spec.annotation is not None:
        y += 12
        _draw_tier(doc, spec.annotation, track, xmap, y, tier_h, left, right)
        y += tier_h + GAP

    if spec.waveform is not None:
        _draw_waveform(doc, spec.waveform, y, wave_h, left, right)
    return doc.close()


def _draw_tier(doc, tier: Tier, track: F0Track, xmap: XMap, top, h, left, right):
    frame = lambda t: (t - track.start) / track.frame_step  # noqa: E731
    clamp = lambda x: min(max(x, left), right)  # noqa: E731
    doc.line(left, top, right, top, "tier-border", stroke=GRID)
    doc.text(left - 6, top + h / 2, tier.name, "tier-name", anchor="end", size=9)
    for it in tier.items:
        x0 = clamp(xmap(frame(it.tmin)))
        if tier.is_interval:
            x1 = clamp(xmap(frame(it.tmax)))
            doc.line(x0, top, x0, top + h, "tier-boundary", stroke=GRID)
            doc.line(x1, top, x1, top + h, "tier-boundary", stroke=GRID)
            if it.label.strip():
                mid = (x0 + x1) / 2
                doc.text(mid, top + 15, it.label, "tier-label", size=11)
                ms = (it.tmax - it.tmin) * 1000.0
                doc.text(mid, top + 30, f"{ms:.0f} ms", "tier-duration", size=9)
        else:
            doc.line(x0, top, x0, top + h, "tier-point", stroke=MODEL)
            doc.text(x0, top + 15, it.label, "tier-label", size=11)


def _draw_waveform(doc, sig: SampledSignal, top, h, left, right):
    s = np.asarray(sig.samples)
    if s.size == 0:
        return
    nb = min(MAX_WAVE_SEGMENTS, s.size)
    edges = np.linspace(0, s.size, nb + 1).astype(int)
    ymap = YMap(-1.0, 1.0, top, top + h)
    xmap = XMap(0, nb - 1, left, right)
    segs = []
    for b in range(nb):
        chunk = s[edges[b]:max(edges[b + 1], edges[b] + 1)]
        x = xmap(b)
        segs.append(f"M{_n(x)} {_n(ymap(float(chunk.max())))}V{_n(ymap(float(chunk.min())))}")
    doc.add(f'<path class="waveform" d="{"".join(segs)}" fill="none" stroke="{MODEL}" '
            f'stroke-width="0.50"/>')


# --------------------------------------------------------------------------
# box plots


def plot_boxes(stats: BoxStats, width: int = 1000, height: int = 400,
               show_points: bool = True, unit: str = "ms", title: str = "") -> str:
    """One box per category on a shared y-scale: quartile box, median line,
    mean dot, min/max whiskers, and the raw values as a dot column."""
    if len(stats) == 0:
        raise EmptyStats("no categories to plot")
    W, H = float(width), float(height)
    left, right = MARGIN_L, W - MARGIN_R
    lo = min(s.min for s in stats.categories.values())
    hi = max(s.max for s in stats.categories.values())
    ymap = YMap(lo, hi, MARGIN_T, H - MARGIN_B)
    desc = (f"Box plot. y: {unit}, linear, shared across categories, padded 5% of range. "
            "Box q1-q3, line median, dot mean, whiskers min/max.")
    doc = _Doc(W, H, desc)
    if title:
        doc.text(W / 2, 18, title, "title", size=13)
    _y_axis(doc, ymap, left, right, unit)
    doc.line(left, ymap.bottom, right, ymap.bottom, "axis")

    k = len(stats)
    slot = (right - left) / k
    bw = min(60.0, slot * 0.5)
    for i, (cat, s) in enumerate(stats.categories.items()):
        cx = left + slot * (i + 0.5)
        g = quoteattr(cat)
        doc.add(f"<g class=\"category\" data-category={g}>")
        doc.line(cx, ymap(s.max), cx, ymap(s.q3), "whisker")
        doc.line(cx, ymap(s.q1), cx, ymap(s.min), "whisker")
        doc.line(cx - bw / 4, ymap(s.max), cx + bw / 4, ymap(s.max), "whisker-cap")
        doc.line(cx - bw / 4, ymap(s.min), cx + bw / 4, ymap(s.min), "whisker-cap")
        top, bot = ymap(s.q3), ymap(s.q1)
        doc.add(f'<rect class="box" x="{_n(cx - bw / 2)}" y="{_n(top)}" width="{_n(bw)}" '
                f'height="{_n(bot - top)}" fill="#eeeeee" stroke="#000000" stroke-width="1.00"/>')
        doc.line(cx - bw / 2, ymap(s.median), cx + bw / 2, ymap(s.median), "median",
                 width=2.0)
        doc.add(f'<circle class="mean" cx="{_n(cx)}" cy="{_n(ymap(s.mean))}" r="3.00" '
                f'fill="#000000"/>')
        if show_points:
            px = cx + bw / 2 + 10
            for v in stats.values.get(cat, ()):
                doc.add(f'<circle class="point" cx="{_n(px)}" cy="{_n(ymap(v))}" r="1.50" '
                        f'fill="{RESIDUAL}"/>')
        doc.text(cx, ymap.bottom + 16, f"{cat} (n={s.n})", "category-label", size=11)
        doc.add("</g>")
    return doc.close()


# --------------------------------------------------------------------------
# moving-window series


def plot_window_series(ws: WindowSeries, width: int = 1000, height: int = 400,
                       title: str = "") -> str:
    """Per-window nPVI in order, the same values sorted (grey), and lines at
    the mean and mean +/- sd."""
    if not ws.values:
        raise EmptySeries("no window values")
    W, H = float(width), float(height)
    left, right = MARGIN_L, W - MARGIN_R
    sd = ws.sd or 0.0
    lo = min(min(ws.values), ws.mean - sd)
    hi = max(max(ws.values), ws.mean + sd)
    ymap = YMap(lo, hi, MARGIN_T, H - MARGIN_B)
    n = len(ws.values)
    xmap = XMap(0, n - 1, left, right)
    desc = (f"Moving-window nPVI (window {ws.window}, step {ws.step}). x: window index; "
            "y: nPVI, linear, padded 5% of range. Black: series; grey: sorted; "
            "horizontal: mean and mean +/- sd.")
    doc = _Doc(W, H, desc)
    if title:
        doc.text(W / 2, 18, title, "title", size=13)
    _y_axis(doc, ymap, left, right, "nPVI")
    doc.line(left, ymap.bottom, right, ymap.bottom, "axis")
    for tk in nice_ticks(0, n - 1, 10):
        doc.line(xmap(tk), ymap.bottom, xmap(tk), ymap.bottom + 4, "xtick")
        doc.text(xmap(tk), ymap.bottom + 14, _label_num(tk), "xtick-label", size=10)

    for cls, v, dash in (("ws-mean", ws.mean, None), ("ws-mean-plus-sd", ws.mean + sd, DASHED),
                         ("ws-mean-minus-sd", ws.mean - sd, DASHED)):
        doc.line(left, ymap(v), right, ymap(v), cls, stroke=MODEL, dash=dash)
    doc.polyline([(xmap(i), ymap(v)) for i, v in enumerate(ws.sorted_values)], "sorted",
                 stroke=SORTED, width=2.0)
    doc.polyline([(xmap(i), ymap(v)) for i, v in enumerate(ws.values)], "series",
                 stroke=TRACE, width=1.5)
    return doc.close()
