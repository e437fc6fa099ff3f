import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from prosodia.annotation import Annotation, LabelledInterval, Tier

sys.path.insert(0, str(Path(__file__).parent))

GOLDEN = Path(__file__).parent / "golden"

# filled by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []

ENGLISH_DURATIONS = [170, 40, 210, 120, 180, 210, 140, 120, 150, 170, 130, 130, 80, 350, 80, 320]


def annotation_from_durations(durations_ms, tier="syllable", labels=None):
    """Contiguous interval tier whose interval lengths are the given durations."""
    items, t = [], 0.0
    for i, d in enumerate(durations_ms):
        end = round(t + d / 1000.0, 9)
        label = labels[i] if labels else f"s{i}"
        items.append(LabelledInterval(t, end, label))
        t = end
    return Annotation(0.0, t, (Tier(tier, "interval", tuple(items)),))


@pytest.fixture
def english_annotation():
    return annotation_from_durations(ENGLISH_DURATIONS)


settings.register_profile("default", derandomize=True, deadline=None)
settings.register_profile("explore", derandomize=False, deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
