import argparse
import json
import subprocess
import sys

import pytest
from conftest import ENGLISH_DURATIONS, annotation_from_durations

from prosodia.annotation import serialize_textgrid
from prosodia.cli import build_parser, display_round, run
from prosodia.signal import F0Track, synth_periodic, write_wav

SUBCOMMANDS = ["track", "stylize", "metrics", "window-npvi", "durations", "rate", "chroma",
               "tonemap", "plot", "validate"]


@pytest.fixture
def english_tg(tmp_path):
    p = tmp_path / "english.TextGrid"
    p.write_text(serialize_textgrid(annotation_from_durations(ENGLISH_DURATIONS)),
                 encoding="utf-8")
    return p


@pytest.fixture
def f0_csv(tmp_path):
    frames = [200.0] * 30 + [None] * 5 + [200.0 / 2 ** 0.25] * 30
    p = tmp_path / "call.csv"
    p.write_text(F0Track(0.0, 0.01, tuple(frames)).to_csv(), encoding="utf-8")
    return p


def _run(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_display_round_half_up():
    assert display_round(59.5) == 60 and display_round(81.6) == 82
    assert display_round(2.5) == 3 and display_round(-0.5) == 0


def test_metrics_worked_example(capsys, english_tg):
    code, out, err = _run(capsys, "metrics", english_tg)
    assert code == 0, err
    d = json.loads(out)
    assert d["schema_version"] == 1
    assert (d["sd"], d["npvi"], d["coeff_var"]) == (82, 60, 50)
    assert d["sd_exact"] == pytest.approx(81.6, abs=0.05)
    assert d["n"] == 16


def test_metrics_population_flag(capsys, english_tg):
    _, out, _ = _run(capsys, "metrics", english_tg, "--sd-denominator", "population")
    assert json.loads(out)["sd"] == 79


def test_metrics_csv(capsys, english_tg):
    code, out, _ = _run(capsys, "metrics", english_tg, "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "field,value"


def test_single_interval_is_data_error(capsys, tmp_path):
    p = tmp_path / "one.TextGrid"
    p.write_text(serialize_textgrid(annotation_from_durations([200])), encoding="utf-8")
    code, out, err = _run(capsys, "metrics", p)
    assert code == 2 and out == ""
    assert "insufficient data: n=1 < 2" in err


def test_missing_file_is_data_error(capsys, tmp_path):
    code, _, err = _run(capsys, "metrics", tmp_path / "nope.TextGrid")
    assert code == 2 and "nope" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as ei:
        run(["metrics", "--bogus", "x"])
    assert ei.value.code == 1
    with pytest.raises(SystemExit) as ei:
        run(["frobnicate"])
    assert ei.value.code == 1
    assert run([]) == 1


def test_unknown_config_key(capsys, tmp_path, english_tg):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\ntier = syllable\nwibble = 3\n")
    code, _, err = _run(capsys, "metrics", english_tg, "--config", cfg)
    assert code == 1 and "config line 3: unknown key 'wibble'" in err


def test_flags_override_config(capsys, tmp_path, english_tg):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("sd_denominator = population\n")
    _, out, _ = _run(capsys, "metrics", english_tg, "--config", cfg)
    assert json.loads(out)["sd"] == 79
    _, out, _ = _run(capsys, "metrics", english_tg, "--config", cfg,
                     "--sd-denominator", "sample")
    assert json.loads(out)["sd"] == 82


@pytest.mark.parametrize("cmd", SUBCOMMANDS + ["plot track", "plot boxes", "plot window"])
def test_help(capsys, cmd):
    with pytest.raises(SystemExit) as ei:
        run(cmd.split() + ["--help"])
    assert ei.value.code == 0
    assert "usage" in capsys.readouterr().out


def _all_parsers(parser):
    yield parser
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                yield from _all_parsers(sub)


def test_every_flag_is_documented():
    for p in _all_parsers(build_parser()):
        text = p.format_help()
        for action in p._actions:
            for opt in action.option_strings:
                assert opt in text
                assert action.help, (p.prog, opt)


def test_metrics_output_is_repeatable(capsys, english_tg):
    assert _run(capsys, "metrics", english_tg) == _run(capsys, "metrics", english_tg)


def test_tonemap_string(capsys):
    code, out, _ = _run(capsys, "tonemap", "LHLLHLLHLLH")
    assert code == 0 and out == "llhllhllhlh\n"
    _, out, _ = _run(capsys, "tonemap", "LHLLHLLHLLH", "--no-final-faithful")
    assert out == "llhllhllhll\n"
    code, _, err = _run(capsys, "tonemap", "LXH")
    assert code == 2


def test_tonemap_textgrid(capsys, tmp_path):
    a = annotation_from_durations([100, 100, 100], labels=["baL", "kaH", "ma L"])
    p = tmp_path / "tem.TextGrid"
    p.write_text(serialize_textgrid(a), encoding="utf-8")
    code, out, _ = _run(capsys, "tonemap", p)
    assert code == 0
    assert out.splitlines() == ["syllable,lexical,phonetic,step", "baL,L,l,plain",
                                "kaH,H,l,downstep", "ma L,L,l,plain"]


def test_batch_json_merged(capsys, tmp_path, english_tg):
    other = tmp_path / "b.TextGrid"
    other.write_text(serialize_textgrid(annotation_from_durations([100, 200, 100])))
    code, out, _ = _run(capsys, "metrics", english_tg, other)
    assert code == 0
    d = json.loads(out)
    assert [r["input"] for r in d["results"]] == [str(english_tg), str(other)]
    assert d["results"][1]["result"]["n"] == 3


def test_batch_partial_failure(capsys, tmp_path, english_tg):
    code, out, err = _run(capsys, "metrics", english_tg, tmp_path / "missing.TextGrid")
    assert code == 2
    assert json.loads(out)["results"][1]["error"] is True
    assert "1 of 2 inputs failed" in err


def test_batch_out_dir(capsys, tmp_path, english_tg, f0_csv):
    out_dir = tmp_path / "plots"
    code, _, _ = _run(capsys, "plot", "window", english_tg, english_tg, "--out-dir", out_dir)
    assert code == 0
    assert (out_dir / "english.svg").read_text().startswith("<?xml")


def test_batch_svg_needs_out_dir(capsys, english_tg):
    code, _, err = _run(capsys, "plot", "boxes", english_tg, english_tg)
    assert code == 1 and "--out-dir" in err


def test_track_from_wav(capsys, tmp_path):
    w = tmp_path / "tone.wav"
    w.write_bytes(write_wav(synth_periodic(200, duration=0.3)))
    code, out, _ = _run(capsys, "track", w)
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "time_s,f0_hz"
    vals = [float(r.split(",")[1]) for r in rows[1:] if r.split(",")[1]]
    assert len(vals) >= 0.95 * (len(rows) - 1)
    assert all(abs(v - 200) <= 2 for v in vals)


def test_validate(capsys, tmp_path, english_tg):
    code, out, _ = _run(capsys, "validate", english_tg)
    assert code == 0 and json.loads(out)["tiers"][0]["items"] == 16
    w = tmp_path / "low.wav"
    w.write_bytes(write_wav(synth_periodic(100, sr=700, duration=0.1)))
    code, _, err = _run(capsys, "validate", w)
    assert code == 2 and "2 x f_max" in err
    code, _, _ = _run(capsys, "validate", w, "--f-max", "300")
    assert code == 0
    bad = tmp_path / "bad.TextGrid"
    bad.write_text('File type = "ooTextFile"\nObject class = "TextGrid"\n\nxmin = 0\n')
    code, _, err = _run(capsys, "validate", bad)
    assert code == 2 and "line" in err


def test_stylize(capsys, tmp_path, f0_csv):
    resid = tmp_path / "r.csv"
    code, out, _ = _run(capsys, "stylize", f0_csv, "--global-degree", "1",
                        "--residual", resid)
    assert code == 0
    d = json.loads(out)
    assert d["global"]["degree"] == 1 and "normalization" in d
    assert d["linear"]["slope_hz_per_frame"] < 0
    assert resid.read_text().startswith("time_s,f0_hz")


def test_chroma_spans(capsys, f0_csv):
    code, out, _ = _run(capsys, "chroma", f0_csv, "--span1", "0,0.29", "--span2", "0.35,0.64")
    assert code == 0
    d = json.loads(out)
    assert d["nearest_interval"] == "minor_third"
    assert d["ratio"] == pytest.approx(2 ** 0.25)
    code, _, _ = _run(capsys, "chroma", f0_csv)
    assert code == 1


def test_chroma_textgrid(capsys, tmp_path, f0_csv):
    a = annotation_from_durations([300, 50, 300], labels=["F01", "", "F02"])
    tg = tmp_path / "call.TextGrid"
    tg.write_text(serialize_textgrid(a))
    code, out, err = _run(capsys, "chroma", f0_csv, "--textgrid", tg)
    assert code == 0, err
    assert json.loads(out)["nearest_interval"] == "minor_third"


def test_durations_and_rate(capsys, tmp_path, english_tg):
    m = tmp_path / "map.csv"
    m.write_text("label,category\ns0,first\n")
    code, out, _ = _run(capsys, "durations", english_tg, "--map", m)
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "category,n,min,q1,median,q3,max,mean"
    assert {r.split(",")[0] for r in rows[1:]} == {"first", "other"}
    code, out, _ = _run(capsys, "rate", english_tg)
    assert json.loads(out)["median_rate"] == pytest.approx(1000 / 145)


def test_window_npvi(capsys, english_tg):
    code, out, _ = _run(capsys, "window-npvi", english_tg, "--size", "16")
    d = json.loads(out)
    assert code == 0 and len(d["values"]) == 1
    code, _, err = _run(capsys, "window-npvi", english_tg, "--size", "17")
    assert code == 2


def test_plot_track_deterministic(capsys, tmp_path, f0_csv):
    outs = []
    for _ in range(2):
        code, out, _ = _run(capsys, "plot", "track", f0_csv, "--stylize")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] and "model-global" in outs[0]


def test_console_module_entry():
    r = subprocess.run([sys.executable, "-m", "prosodia", "tonemap", "HL"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "hl\n"
