"""Praat TextGrid reading, writing and annotation mining.

Both the long ("key = value") and the short (bare values) text formats are
read with the same tokenizer, the way Praat itself reads them: every
whitespace-separated word that does not start a number, a quoted string or a
``<flag>`` is treated as a comment and skipped. Output is always long format.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import (
    EncodingError,
    MalformedTextGrid,
    NotIntervalTier,
    OverlappingIntervals,
    UnknownTier,
)

INTERVAL = "interval"
POINT = "point"

_PRAAT_CLASS = {INTERVAL: "IntervalTier", POINT: "TextTier"}
_KIND_OF_CLASS = {"IntervalTier": INTERVAL, "TextTier": POINT, "PointTier": POINT}

# slack for float noise in hand-edited files
_TIME_TOL = 1e-9


@dataclass(frozen=True)
class LabelledInterval:
    tmin: float
    tmax: float
    label: str = ""

    def __post_init__(self):
        if self.tmin > self.tmax:
            raise ValueError(f"tmin {self.tmin} > tmax {self.tmax}")

    def duration(self) -> float:
        return self.tmax - self.tmin


@dataclass(frozen=True)
class Tier:
    name: str
    kind: str = INTERVAL
    items: tuple[LabelledInterval, ...] = ()

    def __post_init__(self):
        if self.kind not in (INTERVAL, POINT):
            raise ValueError(f"unknown tier kind {self.kind!r}")
        object.__setattr__(self, "items", tuple(self.items))

    @property
    def is_interval(self) -> bool:
        return self.kind == INTERVAL

    def __len__(self):
        return len(self.items)


@dataclass(frozen=True)
class Annotation:
    xmin: float
    xmax: float
    tiers: tuple[Tier, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(self.tiers))

    def tier(self, name: str) -> Tier:
        for t in self.tiers:
            if t.name == name:
                return t
        known = ", ".join(repr(t.name) for t in self.tiers) or "none"
        raise UnknownTier(f"no tier named {name!r} (tiers: {known})")

    @property
    def tier_names(self) -> list[str]:
        return [t.name for t in self.tiers]


@dataclass(frozen=True)
class DurationEntry:
    label: str
    duration: float  # ms


@dataclass(frozen=True)
class DurationSeries:
    entries: tuple[DurationEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for e in self.entries:
            if not e.duration > 0:
                raise ValueError(f"non-positive duration {e.duration} for {e.label!r}")

    @property
    def durations(self) -> list[float]:
        return [e.duration for e in self.entries]

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "duration_ms"])
        for e in self.entries:
            w.writerow([e.label, repr(e.duration)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DurationSeries":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["label", "duration_ms"]:
            raise MalformedTextGrid("duration CSV must start with header 'label,duration_ms'", 1)
        entries = []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != 2:
                raise MalformedTextGrid(f"expected 2 fields, got {len(row)}", lineno)
            try:
                d = float(row[1])
            except ValueError:
                raise MalformedTextGrid(f"bad duration {row[1]!r}", lineno) from None
            if d > 0:
                entries.append(DurationEntry(row[0], d))
        return cls(tuple(entries))


# --------------------------------------------------------------------------
# decoding and tokenizing


def _decode(content: bytes | str) -> str:
    if isinstance(content, str):
        return content.lstrip("﻿")
    try:
        if content.startswith((b"\xff\xfe", b"\xfe\xff")):
            return content.decode("utf-16")
        return content.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"cannot decode TextGrid: {exc}") from None


class _Tokens:
    """Value tokens (numbers, strings, flags) with their source line numbers."""

    def __init__(self, text: str):
        self.toks: list[tuple[str, str, int]] = []
        self._scan(text)
        self.pos = 0
        self.last_line = text.count("\n") + 1

    def _scan(self, text):
        i, n, line = 0, len(text), 1
        while i < n:
            c = text[i]
            if c == "\n":
                line += 1
                i += 1
            elif c.isspace():
                i += 1
            elif c == '"':
                start_line = line
                j = i + 1
                buf = []
                while True:
                    if j >= n:
                        raise MalformedTextGrid("unterminated string", start_line)
                    if text[j] == '"':
                        if j + 1 < n and text[j + 1] == '"':
                            buf.append('"')
                            j += 2
                            continue
                        break
                    if text[j] == "\n":
                        line += 1
                    buf.append(text[j])
                    j += 1
                self.toks.append(("str", "".join(buf), start_line))
                i = j + 1
            else:
                j = i
                while j < n and not text[j].isspace() and text[j] != '"':
                    j += 1
                word = text[i:j]
                if word[0] in "0123456789+-.":
                    self.toks.append(("num", word, line))
                elif word[0] == "<":
                    self.toks.append(("flag", word, line))
                # anything else is a key name, bracket index or comment
                i = j

    def _next(self, what):
        if self.pos >= len(self.toks):
            raise MalformedTextGrid(f"unexpected end of file, expected {what}", self.last_line)
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    @property
    def line(self):
        if self.pos < len(self.toks):
            return self.toks[self.pos][2]
        return self.last_line

    def string(self, what="string") -> str:
        kind, val, line = self._next(what)
        if kind != "str":
            raise MalformedTextGrid(f"expected {what}, found {val!r}", line)
        return val

    def number(self, what="number") -> float:
        kind, val, line = self._next(what)
        if kind != "num":
            raise MalformedTextGrid(f"expected {what}, found {val!r}", line)
        try:
            return float(val)
        except ValueError:
            raise MalformedTextGrid(f"bad number {val!r} for {what}", line) from None

    def integer(self, what="count") -> int:
        line = self.line
        x = self.number(what)
        if x != int(x) or x < 0:
            raise MalformedTextGrid(f"expected non-negative integer {what}, found {x}", line)
        return int(x)

    def peek_kind(self):
        if self.pos < len(self.toks):
            return self.toks[self.pos][0]
        return None

    def flag(self, what="flag") -> str:
        kind, val, line = self._next(what)
        if kind != "flag":
            raise MalformedTextGrid(f"expected {what}, found {val!r}", line)
        return val

    def at_end(self):
        return self.pos >= len(self.toks)


# --------------------------------------------------------------------------
# parsing


def parse_textgrid(content: bytes | str) -> Annotation:
    """Parse a TextGrid (long or short text format, UTF-8 or UTF-16)."""
    tk = _Tokens(_decode(content))
    ftype = tk.string("file type")
    if ftype != "ooTextFile":
        raise MalformedTextGrid(f"not a Praat text file (file type {ftype!r})", 1)
    oclass = tk.string("object class")
    if oclass != "TextGrid":
        raise MalformedTextGrid(f"object class is {oclass!r}, not 'TextGrid'", 1)
    xmin = tk.number("xmin")
    xmax = tk.number("xmax")
    if xmin > xmax:
        raise MalformedTextGrid(f"xmin {xmin} > xmax {xmax}", tk.line)

    tiers: list[Tier] = []
    exists = tk.flag("tiers? flag")
    if exists == "<exists>":
        ntiers = tk.integer("tier count")
        for _ in range(ntiers):
            tiers.append(_parse_tier(tk, xmin, xmax))
    elif exists != "<absent>":
        raise MalformedTextGrid(f"unknown flag {exists!r}", tk.line)
    if not tk.at_end():
        raise MalformedTextGrid("trailing content after last tier", tk.line)

    seen = set()
    for t in tiers:
        if t.name in seen:
            raise MalformedTextGrid(f"duplicate tier name {t.name!r}")
        seen.add(t.name)
    return Annotation(xmin, xmax, tuple(tiers))


def _parse_tier(tk: _Tokens, gxmin: float, gxmax: float) -> Tier:
    line = tk.line
    cls = tk.string("tier class")
    if cls not in _KIND_OF_CLASS:
        raise MalformedTextGrid(f"unknown tier class {cls!r}", line)
    kind = _KIND_OF_CLASS[cls]
    name = tk.string("tier name")
    txmin = tk.number("tier xmin")
    txmax = tk.number("tier xmax")
    if txmin < gxmin - _TIME_TOL or txmax > gxmax + _TIME_TOL or txmin > txmax:
        raise MalformedTextGrid(
            f"tier {name!r} range [{txmin}, {txmax}] outside [{gxmin}, {gxmax}]", line)
    count = tk.integer("item count")
    items = []
    for _ in range(count):
        iline = tk.line
        if kind == INTERVAL:
            a = tk.number("interval xmin")
            b = tk.number("interval xmax")
            label = tk.string("interval text")
        else:
            a = b = tk.number("point time")
            label = tk.string("point mark")
        if a > b:
            raise MalformedTextGrid(f"interval [{a}, {b}] in tier {name!r} has tmin > tmax", iline)
        if a < gxmin - _TIME_TOL or b > gxmax + _TIME_TOL:
            raise MalformedTextGrid(
                f"item [{a}, {b}] in tier {name!r} lies outside [{gxmin}, {gxmax}]", iline)
        if items:
            prev = items[-1]
            if a < prev.tmin:
                raise MalformedTextGrid(f"items in tier {name!r} not sorted by time", iline)
            if kind == INTERVAL and a < prev.tmax - _TIME_TOL:
                raise OverlappingIntervals(
                    f"line {iline}: tier {name!r}: interval [{a}, {b}] overlaps "
                    f"[{prev.tmin}, {prev.tmax}]")
        items.append(LabelledInterval(a, b, label))
    return Tier(name, kind, tuple(items))


# --------------------------------------------------------------------------
# writing


def _fmt(x: float) -> str:
    # repr is the shortest string that reads back to the same double
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _quote(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def serialize_textgrid(a: Annotation) -> str:
    """Long-format TextGrid text; parses back to an equal Annotation."""
    out = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "",
        f"xmin = {_fmt(a.xmin)} ",
        f"xmax = {_fmt(a.xmax)} ",
    ]
    if not a.tiers:
        out.append("tiers? <absent> ")
        return "\n".join(out) + "\n"
    out.append("tiers? <exists> ")
    out.append(f"size = {len(a.tiers)} ")
    out.append("item []: ")
    for i, t in enumerate(a.tiers, start=1):
        tmin = min([a.xmin] + [it.tmin for it in t.items])
        tmax = max([a.xmax] + [it.tmax for it in t.items])
        out.append(f"    item [{i}]:")
        out.append(f"        class = {_quote(_PRAAT_CLASS[t.kind])} ")
        out.append(f"        name = {_quote(t.name)} ")
        out.append(f"        xmin = {_fmt(tmin)} ")
        out.append(f"        xmax = {_fmt(tmax)} ")
        if t.kind == INTERVAL:
            out.append(f"        intervals: size = {len(t.items)} ")
            for j, it in enumerate(t.items, start=1):
                out.append(f"        intervals [{j}]:")
                out.append(f"            xmin = {_fmt(it.tmin)} ")
                out.append(f"            xmax = {_fmt(it.tmax)} ")
                out.append(f"            text = {_quote(it.label)} ")
        else:
            out.append(f"        points: size = {len(t.items)} ")
            for j, it in enumerate(t.items, start=1):
                out.append(f"        points [{j}]:")
                out.append(f"            number = {_fmt(it.tmin)} ")
                out.append(f"            mark = {_quote(it.label)} ")
    return "\n".join(out) + "\n"


def serialize_textgrid_short(a: Annotation) -> str:
    """Short-format text, mainly for producing test fixtures."""
    out = ['File type = "ooTextFile"', 'Object class = "TextGrid"', "",
           _fmt(a.xmin), _fmt(a.xmax)]
    if not a.tiers:
        out.append("<absent>")
        return "\n".join(out) + "\n"
    out += ["<exists>", str(len(a.tiers))]
    for t in a.tiers:
        out += [_quote(_PRAAT_CLASS[t.kind]), _quote(t.name), _fmt(a.xmin), _fmt(a.xmax),
                str(len(t.items))]
        for it in t.items:
            if t.kind == INTERVAL:
                out += [_fmt(it.tmin), _fmt(it.tmax), _quote(it.label)]
            else:
                out += [_fmt(it.tmin), _quote(it.label)]
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# mining


def extract_durations(a: Annotation, tier_name: str,
                      exclude_labels: Iterable[str] = ()) -> DurationSeries:
    """Interval durations (ms) of one tier in temporal order.

    Intervals whose stripped label is in ``exclude_labels`` and zero-length
    intervals are dropped.
    """
    tier = a.tier(tier_name)
    if not tier.is_interval:
        raise NotIntervalTier(f"tier {tier_name!r} is a point tier")
    excluded = {s.strip() for s in exclude_labels}
    entries = []
    for it in tier.items:
        if it.label.strip() in excluded:
            continue
        # rounding to 1e-9 ms removes float noise from the seconds->ms product
        ms = round((it.tmax - it.tmin) * 1000.0, 9)
        if ms > 0:
            entries.append(DurationEntry(it.label, ms))
    return DurationSeries(tuple(entries))


def labelled_spans(a: Annotation, tier_name: str) -> list[LabelledInterval]:
    """Non-empty-labelled intervals of an interval tier (used as fit domains)."""
    tier = a.tier(tier_name)
    if not tier.is_interval:
        raise NotIntervalTier(f"tier {tier_name!r} is a point tier")
    return [it for it in tier.items if it.label.strip() and it.tmax > it.tmin]


OTHER = "other"


def group_by_label(ds: DurationSeries,
                   category_of: Mapping[str, str] | Callable[[str], str | None] | None = None,
                   ) -> dict[str, list[float]]:
    """Group durations by category, in first-seen category order.

    ``category_of`` may be a mapping, a callable returning a category (or
    None), or None for grouping by the label itself. Unmapped labels go to
    ``"other"``.
    """
    groups: dict[str, list[float]] = {}
    for e in ds.entries:
        if category_of is None:
            cat = e.label
        elif callable(category_of):
            cat = category_of(e.label)
        else:
            cat = category_of.get(e.label)
        if cat is None:
            cat = OTHER
        groups.setdefault(cat, []).append(e.duration)
    return groups


def read_category_map(text: str) -> dict[str, str]:
    """Two-column CSV ``label,category`` (a header row is optional)."""
    mapping = {}
    for row in csv.reader(io.StringIO(text)):
        if not row or row[0].startswith("#"):
            continue
        if len(row) != 2:
            raise MalformedTextGrid(f"category map rows need 2 fields: {row!r}")
        if [c.strip() for c in row] == ["label", "category"]:
            continue
        mapping[row[0]] = row[1]
    return mapping
