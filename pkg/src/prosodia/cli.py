"""Command-line entry point.

Exit status: 0 success, 1 usage error, 2 data error. Machine output goes to
stdout (or ``--out`` / ``--out-dir``); diagnostics go to stderr, one line each.
Inputs are recognised by extension: ``.wav`` audio, ``.csv`` tables (F0 or
durations, depending on the command), anything else a TextGrid.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import annotation as ann
from . import metrics as met
from . import render, scales, signal, stylization, tonefst
from .config import Config, ConfigError, convert, parse_config
from .errors import ProsodyError

SCHEMA_VERSION = 1
PROG = "prosodia"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class Output:
    text: str
    ext: str
    extra: dict = field(default_factory=dict)  # suffix -> text, written only with --out-dir

    @property
    def is_json(self):
        return self.ext == ".json"


def display_round(x: float) -> int:
    """Half-up rounding to an integer, as used in reports."""
    return int(math.floor(x + 0.5))


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _json(payload: dict) -> Output:
    return Output(_dumps({"schema_version": SCHEMA_VERSION, **payload}), ".json")


# --------------------------------------------------------------------------
# input helpers


def _kind(path: str) -> str:
    suffix = Path(path).suffix.lower()
    return {".wav": "wav", ".csv": "csv"}.get(suffix, "textgrid")


def _read_bytes(path: str) -> bytes:
    return Path(path).read_bytes()


def _read_text(path: str) -> str:
    return Path(path).read_bytes().decode("utf-8-sig")


def _f0_params(cfg: Config) -> signal.F0Params:
    return signal.F0Params(cfg.f_min, cfg.f_max, cfg.frame_step, cfg.window,
                           cfg.voicing_threshold)


def _load_track(path: str, cfg: Config) -> signal.F0Track:
    if _kind(path) == "wav":
        tr = signal.estimate_f0(signal.read_wav(_read_bytes(path)), _f0_params(cfg))
    else:
        tr = signal.ingest_f0_csv(_read_text(path), cfg.step)
    if cfg.median_width > 1:
        tr = stylization.median_filter(tr, cfg.median_width)
    return tr


def _load_durations(path: str, cfg: Config) -> ann.DurationSeries:
    if _kind(path) == "csv":
        return ann.DurationSeries.from_csv(_read_text(path))
    a = ann.parse_textgrid(_read_bytes(path))
    return ann.extract_durations(a, cfg.tier, cfg.exclude_labels)


def _span(text: str) -> tuple[float, float]:
    try:
        t0, t1 = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"span must be 't0,t1' in seconds, got {text!r}") from None
    if t1 < t0:
        raise UsageError(f"span {text!r} ends before it starts")
    return t0, t1


# --------------------------------------------------------------------------
# commands; each takes (path, args, cfg) and returns an Output


def cmd_track(path, args, cfg):
    return Output(_load_track(path, cfg).to_csv(), ".csv")


def _stylize(path, args, cfg):
    track = _load_track(path, cfg)
    domains = []
    if args.textgrid:
        a = ann.parse_textgrid(_read_bytes(args.textgrid))
        domains = [(it.tmin, it.tmax) for it in ann.labelled_spans(a, cfg.tier)]
    gdeg = cfg.global_degree if cfg.global_degree is not None else \
        stylization.default_degree(cfg.events)
    ldeg = cfg.local_degree if cfg.local_degree is not None else gdeg
    return track, stylization.mps_stylize(track, domains, gdeg, ldeg)


def cmd_stylize(path, args, cfg):
    track, res = _stylize(path, args, cfg)
    lin = stylization.track_linear_fit(track)
    st = signal.track_stats(track)
    payload = res.to_dict()
    payload["linear"] = {"intercept_hz": lin.a, "slope_hz_per_frame": lin.m,
                         "sd_residual_hz": lin.sd_residual, "frame_step_s": track.frame_step}
    payload["track"] = {"min": st.min, "max": st.max, "mean": st.mean, "median": st.median,
                        "voiced_count": st.voiced_count, "total_count": st.total_count}
    out = _json(payload)
    out.extra[".residual.csv"] = res.residual.to_csv()
    if args.residual:
        Path(args.residual).write_text(res.residual.to_csv(), encoding="utf-8")
    return out


def _report_fields(d: dict, rounded: tuple[str, ...]) -> dict:
    out = {}
    for k, v in d.items():
        if k in rounded:
            out[k] = display_round(v)
            out[k + "_exact"] = v
        else:
            out[k] = v
    return out


_METRIC_FIELDS = ("mean", "median", "min", "max", "sd", "coeff_var", "rpvi", "npvi", "vi_det")


def cmd_metrics(path, args, cfg):
    ds = _load_durations(path, cfg)
    rep = met.metrics_report(ds.durations, cfg.sd_denominator)
    if args.format == "csv":
        d = rep.to_dict()
        return Output("field,value\n" + "".join(f"{k},{v!r}\n" for k, v in d.items()), ".csv")
    payload = _report_fields(rep.to_dict(), _METRIC_FIELDS)
    payload["sd_denominator"] = cfg.sd_denominator
    return _json(payload)


def cmd_window_npvi(path, args, cfg):
    ds = _load_durations(path, cfg)
    ws = met.moving_npvi(ds.durations, cfg.npvi_window, cfg.npvi_step, cfg.sd_denominator)
    if args.format == "csv":
        lines = ["index,npvi,sorted_npvi"]
        lines += [f"{i},{v!r},{s!r}" for i, (v, s) in enumerate(zip(ws.values, ws.sorted_values))]
        return Output("\n".join(lines) + "\n", ".csv")
    return _json(ws.to_dict())


def cmd_durations(path, args, cfg):
    ds = _load_durations(path, cfg)
    mapping = ann.read_category_map(_read_text(args.map)) if args.map else None
    groups = ann.group_by_label(ds, mapping)
    bs = met.box_stats(groups, cfg.quartile_method)
    if args.format == "json":
        return _json({"quartile_method": cfg.quartile_method,
                      "categories": {c: vars(s) for c, s in bs.categories.items()}})
    return Output(bs.to_csv(), ".csv")


def cmd_rate(path, args, cfg):
    ds = _load_durations(path, cfg)
    r = met.speech_rate(ds.durations)
    return _json(vars(r))


def cmd_chroma(path, args, cfg):
    track = _load_track(path, cfg)
    if args.span1 and args.span2:
        s1, s2 = _span(args.span1), _span(args.span2)
    elif args.textgrid:
        a = ann.parse_textgrid(_read_bytes(args.textgrid))
        if len(cfg.chroma_labels) != 2:
            raise UsageError("chroma labels must name exactly two intervals")
        spans = []
        for lab in cfg.chroma_labels:
            hits = [it for it in a.tier(cfg.tier).items if it.label.strip() == lab]
            if not hits:
                raise ann.UnknownTier(f"no interval labelled {lab!r} in tier {cfg.tier!r}")
            spans.append((hits[0].tmin, hits[0].tmax))
        s1, s2 = spans
    else:
        raise UsageError("chroma needs --span1 and --span2, or --textgrid")
    rep = scales.chroma_analyze(track, s1, s2)
    return _json({**rep.to_dict(), "span1": list(s1), "span2": list(s2)})


def cmd_tonemap(item, args, cfg):
    ff = not args.no_final_faithful
    if os.path.exists(item) and _kind(item) == "textgrid":
        a = ann.parse_textgrid(_read_bytes(item))
        tier = a.tier(cfg.tier)
        sylls = [it.label.strip() for it in tier.items
                 if it.label.strip() not in {s.strip() for s in cfg.exclude_labels}]
        tones = [tonefst.tone_of_label(s) for s in sylls]
        missing = [s for s, t in zip(sylls, tones) if t is None]
        if missing:
            raise tonefst.InvalidToneSymbol(
                f"labels without a final H/L tone: {', '.join(missing[:5])}")
        lex = "".join(tones)
    else:
        lex = "".join(item.split())
        sylls = list(lex)
    out = tonefst.transduce(lex, ff)
    if args.format == "text" or (args.format is None and not os.path.exists(item)):
        return Output(out + "\n", ".txt")
    marks = tonefst.annotate_steps(lex, ff)
    lines = ["syllable,lexical,phonetic,step"]
    lines += [f"{s},{x},{y},{m}" for s, x, y, m in zip(sylls, lex, out, marks)]
    return Output("\n".join(lines) + "\n", ".csv")


def cmd_plot(path, args, cfg):
    w, h = cfg.plot_width, cfg.plot_height
    if args.kind == "track":
        track = _load_track(path, cfg)
        tier = None
        gm, lms, resid = None, (), None
        if args.textgrid:
            tier = ann.parse_textgrid(_read_bytes(args.textgrid)).tier(cfg.tier)
        if args.stylize:
            _, res = _stylize(path, args, cfg)
            gm, lms, resid = res.global_model, res.locals, res.residual
        wave = signal.read_wav(_read_bytes(args.wav)) if args.wav else None
        spec = render.PlotSpec(track, w, h, gm, lms, resid, tier, wave,
                               stat_lines=not args.no_stats, title=args.title or "")
        return Output(render.plot_track(spec), ".svg")
    ds = _load_durations(path, cfg)
    if args.kind == "boxes":
        mapping = ann.read_category_map(_read_text(args.map)) if args.map else None
        bs = met.box_stats(ann.group_by_label(ds, mapping), cfg.quartile_method)
        return Output(render.plot_boxes(bs, w, h, title=args.title or ""), ".svg")
    ws = met.moving_npvi(ds.durations, cfg.npvi_window, cfg.npvi_step, cfg.sd_denominator)
    return Output(render.plot_window_series(ws, w, h, title=args.title or ""), ".svg")


def cmd_validate(path, args, cfg):
    if _kind(path) == "wav":
        sig = signal.read_wav(_read_bytes(path))
        ok = signal.validate_nyquist(sig.sample_rate, cfg.f_max)
        if not ok:
            raise signal.NyquistViolation(
                f"sample rate {sig.sample_rate} Hz does not exceed 2 x f_max ({cfg.f_max} Hz)")
        return _json({"kind": "wav", "sample_rate": sig.sample_rate, "samples": len(sig),
                      "duration_s": sig.duration, "f_max": cfg.f_max, "nyquist_ok": True})
    a = ann.parse_textgrid(_read_bytes(path))
    tiers = [{"name": t.name, "kind": t.kind, "items": len(t.items),
              "empty_labels": sum(1 for it in t.items if not it.label.strip())}
             for t in a.tiers]
    return _json({"kind": "textgrid", "xmin": a.xmin, "xmax": a.xmax, "tiers": tiers})


COMMANDS = {
    "track": cmd_track, "stylize": cmd_stylize, "metrics": cmd_metrics,
    "window-npvi": cmd_window_npvi, "durations": cmd_durations, "rate": cmd_rate,
    "chroma": cmd_chroma, "tonemap": cmd_tonemap, "plot": cmd_plot, "validate": cmd_validate,
}


# --------------------------------------------------------------------------
# argument parsing


def _f0_flags(p):
    g = p.add_argument_group("F0 analysis (for .wav input)")
    g.add_argument("--f-min", dest="f_min", type=float, help="lowest F0 searched, Hz (70)")
    g.add_argument("--f-max", dest="f_max", type=float, help="highest F0 searched, Hz (400)")
    g.add_argument("--frame-step", dest="frame_step", type=float,
                   help="frame step, s (0.01)")
    g.add_argument("--window", type=float, help="analysis window, s (0.02)")
    g.add_argument("--voicing-threshold", dest="voicing_threshold", type=float,
                   help="minimum normalized correlation for a voiced frame (0.3)")
    g.add_argument("--step", type=float,
                   help="frame step override for F0 CSVs with fewer than two rows, s")
    g.add_argument("--median-width", dest="median_width", type=int,
                   help="odd median-filter width applied to the track (1 = off)")


def _tier_flags(p):
    p.add_argument("--tier", help="interval tier to mine (syllable)")
    p.add_argument("--exclude", dest="exclude_labels",
                   help="comma-separated labels to skip, e.g. ',sil,pau' "
                        "(default: empty, sil, sp, pau, #, _, <p:>)")


def _stylize_flags(p):
    p.add_argument("--textgrid", help="TextGrid whose --tier intervals are the local domains")
    p.add_argument("--global-degree", dest="global_degree", type=int,
                   help="degree of the whole-track model (default: from --events)")
    p.add_argument("--local-degree", dest="local_degree", type=int,
                   help="degree of the per-domain models (default: global degree)")
    p.add_argument("--events", type=int,
                   help="number of accents shaping the contour; degree = max(2, events)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Prosodic analysis of annotated speech.")
    parser.add_argument("--version", action="version", version=f"{PROG} 0.1.0")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def add(name, help_, inputs_help="input files"):
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("inputs", nargs="+", help=inputs_help)
        p.add_argument("--config", help="key=value config file (flags override it)")
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--out-dir", dest="out_dir",
                       help="write one output per input into this directory")
        return p

    p = add("track", "Estimate an F0 track from WAV audio; writes time_s,f0_hz CSV.",
            "mono 16-bit PCM WAV files")
    _f0_flags(p)

    p = add("stylize", "Fit global and per-interval polynomial models to an F0 track; "
            "writes model JSON.", "F0 CSV or WAV files")
    _f0_flags(p)
    _stylize_flags(p)
    p.add_argument("--tier", help="tier of --textgrid giving the local domains (syllable)")
    p.add_argument("--residual", help="also write the residual track as CSV here "
                   "(with --out-dir it goes to <name>.residual.csv)")

    p = add("metrics", "SD, coefficient of variation, rPVI, nPVI and Deterding VI of "
            "interval durations.", "TextGrid or label,duration_ms CSV files")
    _tier_flags(p)
    p.add_argument("--sd-denominator", dest="sd_denominator",
                   choices=("sample", "population"), help="N-1 (sample, default) or N (population)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="output format (json)")

    p = add("window-npvi", "nPVI in a window moved along the duration sequence.",
            "TextGrid or label,duration_ms CSV files")
    _tier_flags(p)
    p.add_argument("--size", dest="npvi_window", type=int, help="window length (5)")
    p.add_argument("--step", dest="npvi_step", type=int, help="window step (1)")
    p.add_argument("--sd-denominator", dest="sd_denominator",
                   choices=("sample", "population"), help="for the summary sd (sample)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="output format (json)")

    p = add("durations", "Box statistics of durations grouped by label category.",
            "TextGrid or label,duration_ms CSV files")
    _tier_flags(p)
    p.add_argument("--map", help="label,category CSV (default: group by label)")
    p.add_argument("--quartile-method", dest="quartile_method",
                   choices=("inclusive", "exclusive"), help="quartile method (inclusive)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (csv)")

    p = add("rate", "Median-based speech rate.", "TextGrid or label,duration_ms CSV files")
    _tier_flags(p)

    p = add("chroma", "Musical interval between the mean F0 of two spans.",
            "F0 CSV or WAV files")
    _f0_flags(p)
    p.add_argument("--span1", help="first span 't0,t1' in seconds")
    p.add_argument("--span2", help="second span 't0,t1' in seconds")
    p.add_argument("--textgrid", help="take the spans from labelled intervals of --tier")
    p.add_argument("--tier", help="tier holding the span labels (syllable)")
    p.add_argument("--labels", dest="chroma_labels",
                   help="comma-separated labels of the two spans (F01,F02)")

    p = add("tonemap", "Map lexical H/L tones to terraced phonetic h/l tones.",
            "tone strings like LHLLH, or TextGrids whose --tier labels end in H or L")
    _tier_flags(p)
    p.add_argument("--no-final-faithful", action="store_true",
                   help="do not realise the last tone faithfully (pure transducer output)")
    p.add_argument("--format", choices=("text", "csv"),
                   help="text (tone strings) or syllable,lexical,phonetic,step CSV "
                        "(default: text for strings, csv for TextGrids)")

    p = sub.add_parser("plot", help="Render SVG plots.", description="Render SVG plots.")
    psub = p.add_subparsers(dest="kind", metavar="KIND", parser_class=_Parser, required=True)

    def add_plot(name, help_, inputs_help):
        q = psub.add_parser(name, help=help_, description=help_)
        q.add_argument("inputs", nargs="+", help=inputs_help)
        q.add_argument("--config", help="key=value config file (flags override it)")
        q.add_argument("--out", help="write the SVG here instead of stdout")
        q.add_argument("--out-dir", dest="out_dir", help="one SVG per input in this directory")
        q.add_argument("--width", dest="plot_width", type=int, help="pixels (1000)")
        q.add_argument("--height", dest="plot_height", type=int, help="pixels (400)")
        q.add_argument("--title", help="plot title")
        return q

    q = add_plot("track", "F0 trace with statistic lines, models, residual, labels, "
                 "waveform.", "F0 CSV or WAV files")
    _f0_flags(q)
    _stylize_flags(q)
    q.add_argument("--tier", help="tier of --textgrid to draw (syllable)")
    q.add_argument("--stylize", action="store_true",
                   help="overlay global/local models and the residual panel")
    q.add_argument("--wav", help="WAV file drawn as a waveform thumbnail")
    q.add_argument("--no-stats", action="store_true", help="omit max/min/mean/median lines")

    q = add_plot("boxes", "Box plots of durations by category.",
                 "TextGrid or label,duration_ms CSV files")
    _tier_flags(q)
    q.add_argument("--map", help="label,category CSV (default: group by label)")
    q.add_argument("--quartile-method", dest="quartile_method",
                   choices=("inclusive", "exclusive"), help="quartile method (inclusive)")

    q = add_plot("window", "Moving-window nPVI series with sorted values and mean +/- sd.",
                 "TextGrid or label,duration_ms CSV files")
    _tier_flags(q)
    q.add_argument("--size", dest="npvi_window", type=int, help="window length (5)")
    q.add_argument("--step", dest="npvi_step", type=int, help="window step (1)")

    p = add("validate", "Lint TextGrids; check WAV sampling against --f-max.",
            "TextGrid or WAV files")
    p.add_argument("--f-max", dest="f_max", type=float,
                   help="highest frequency to be measured, Hz (400)")
    return parser


def _resolve_config(args) -> Config:
    cfg = Config()
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
        cfg = parse_config(text, cfg)
    flags = dict(vars(args))
    for key in ("exclude_labels", "chroma_labels"):
        if isinstance(flags.get(key), str):
            flags[key] = convert(key, flags[key])
    return cfg.updated(flags)


def _emit(out: Output, dest: str | None):
    if dest:
        Path(dest).write_text(out.text, encoding="utf-8")
    else:
        sys.stdout.write(out.text)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        print(f"{PROG}: error: a command is required", file=sys.stderr)
        return 1
    try:
        cfg = _resolve_config(args)
    except ConfigError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1

    handler = COMMANDS[args.command]
    inputs = args.inputs
    batch = len(inputs) > 1
    if batch and args.out:
        print(f"{PROG}: error: --out takes a single input; use --out-dir for batches",
              file=sys.stderr)
        return 1
    if getattr(args, "residual", None) and batch:
        print(f"{PROG}: error: --residual takes a single input; use --out-dir",
              file=sys.stderr)
        return 1

    results, failures = [], 0
    for item in inputs:
        try:
            out = handler(item, args, cfg)
        except UsageError as exc:
            print(f"{PROG}: error: {exc}", file=sys.stderr)
            return 1
        except (ProsodyError, ValueError, OSError) as exc:
            failures += 1
            msg = exc.strerror if isinstance(exc, OSError) and exc.strerror else str(exc)
            print(f"{PROG}: {item}: {msg}", file=sys.stderr)
            results.append((item, None))
            continue
        results.append((item, out))

    done = [(item, out) for item, out in results if out is not None]
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        for item, out in done:
            stem = Path(item).stem if os.path.exists(item) else item
            Path(args.out_dir, stem + out.ext).write_text(out.text, encoding="utf-8")
            for suffix, text in out.extra.items():
                Path(args.out_dir, stem + suffix).write_text(text, encoding="utf-8")
    elif not batch:
        if done:
            _emit(done[0][1], args.out)
    elif all(out.is_json for _, out in done):
        merged = {"schema_version": SCHEMA_VERSION, "results": []}
        for item, out in results:
            entry = {"input": item}
            if out is None:
                entry["error"] = True
            else:
                body = json.loads(out.text)
                body.pop("schema_version", None)
                entry["result"] = body
            merged["results"].append(entry)
        sys.stdout.write(_dumps(merged))
    elif all(out.ext == ".txt" for _, out in done):
        sys.stdout.write("".join(out.text for _, out in done))
    else:
        print(f"{PROG}: error: several inputs with {done[0][1].ext if done else 'file'} "
              "output need --out-dir", file=sys.stderr)
        return 1

    if failures:
        if batch:
            print(f"{PROG}: {failures} of {len(inputs)} inputs failed", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
