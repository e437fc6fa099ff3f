"""Rewrite tests/golden/*.svg from the fixed cases in tests/golden_cases.py.

Run only when a rendering change is intended; review the diff before committing.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from golden_cases import render_all  # noqa: E402


def main():
    out = ROOT / "tests" / "golden"
    out.mkdir(exist_ok=True)
    for name, svg in render_all().items():
        (out / name).write_text(svg, encoding="utf-8", newline="\n")
        print(f"wrote {out / name} ({len(svg)} bytes)")


if __name__ == "__main__":
    main()
