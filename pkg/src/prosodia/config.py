"""Run configuration: defaults, an optional key=value file, then command-line flags.

Later sources win: flags override file values, which override defaults.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from typing import Any, Mapping

DEFAULT_EXCLUDE = ("", "sil", "sp", "pau", "#", "_", "<p:>")


class ConfigError(Exception):
    """Bad configuration (unknown key, unparseable value); a usage error."""


@dataclass(frozen=True)
class Config:
    # F0 analysis
    f_min: float = 70.0
    f_max: float = 400.0
    frame_step: float = 0.01
    window: float = 0.02
    voicing_threshold: float = 0.3
    step: float | None = None  # frame-step override for single-row F0 CSVs
    median_width: int = 1
    # metrics
    sd_denominator: str = "sample"
    quartile_method: str = "inclusive"
    npvi_window: int = 5
    npvi_step: int = 1
    # annotation
    tier: str = "syllable"
    exclude_labels: tuple[str, ...] = DEFAULT_EXCLUDE
    # stylisation
    global_degree: int | None = None
    local_degree: int | None = None
    events: int = 0
    # chroma
    chroma_labels: tuple[str, ...] = ("F01", "F02")
    # plots
    plot_width: int = 1000
    plot_height: int = 400

    def updated(self, values: Mapping[str, Any]) -> "Config":
        known = {f.name for f in fields(self)}
        given = {k: v for k, v in values.items() if k in known and v is not None}
        return dataclasses.replace(self, **given)


_TYPES = {
    "f_min": float, "f_max": float, "frame_step": float, "window": float,
    "voicing_threshold": float, "step": float, "median_width": int,
    "sd_denominator": str, "quartile_method": str, "npvi_window": int, "npvi_step": int,
    "tier": str, "exclude_labels": "list", "global_degree": int, "local_degree": int,
    "events": int, "chroma_labels": "list", "plot_width": int, "plot_height": int,
}

_CHOICES = {"sd_denominator": ("sample", "population"),
            "quartile_method": ("inclusive", "exclusive")}


def parse_list(text: str) -> tuple[str, ...]:
    """Comma-separated list; surrounding whitespace is stripped, empty items kept
    (so ``exclude_labels = ,sil`` excludes the empty label and ``sil``)."""
    return tuple(s.strip() for s in text.split(","))


def convert(key: str, raw: str):
    kind = _TYPES[key]
    try:
        if kind == "list":
            return parse_list(raw)
        val = kind(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    if key in _CHOICES and val not in _CHOICES[key]:
        raise ConfigError(f"{key} must be one of {', '.join(_CHOICES[key])}, not {val!r}")
    return val


def parse_config(text: str, base: Config | None = None) -> Config:
    """Read ``key = value`` lines; ``#`` starts a comment line."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, raw = (p.strip() for p in s.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        values[key] = convert(key, raw)
    return (base or Config()).updated(values)
