"""Terraced-tone realisation: a two-state transducer and the equivalent rewrite rules.

Lexical tones are upper case (H, L); phonetic tones lower case (h, l).
In state H every input surfaces as h, in state L as l, and the next state is
the state named by the input tone. So each output tone is conditioned by the
preceding *lexical* tone: H after L is downstepped to l, L after H is
upstepped to h.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyInput, InvalidToneSymbol

STATE_H = "State_H"
STATE_L = "State_L"

PLAIN = "plain"
DOWNSTEP = "downstep"
UPSTEP = "upstep"

_FAITHFUL = {"H": "h", "L": "l"}
_START = {"H": STATE_H, "L": STATE_L}

# (state, input) -> (output, next state)
TRANSITIONS: dict[tuple[str, str], tuple[str, str]] = {
    (STATE_H, "H"): ("h", STATE_H),
    (STATE_H, "L"): ("h", STATE_L),
    (STATE_L, "L"): ("l", STATE_L),
    (STATE_L, "H"): ("l", STATE_H),
}


def _check(lex: str) -> str:
    if not lex:
        raise EmptyInput("empty tone string")
    bad = sorted(set(lex) - {"H", "L"})
    if bad:
        raise InvalidToneSymbol(f"lexical tones must be H or L, found {''.join(bad)!r}")
    return lex


@dataclass(frozen=True)
class ToneFST:
    transitions: dict = field(default_factory=lambda: dict(TRANSITIONS))
    final_faithful: bool = True

    @property
    def states(self) -> frozenset[str]:
        return frozenset(s for s, _ in self.transitions) | frozenset(
            n for _, n in self.transitions.values())

    def is_deterministic_total(self) -> bool:
        keys = list(self.transitions)
        return len(keys) == len(set(keys)) and all(
            (s, a) in self.transitions for s in self.states for a in "HL")

    def run(self, lex: str, start: str | None = None) -> tuple[str, list[str]]:
        """Output string and visited state path. The start state defaults to
        the state matching the first lexical tone."""
        _check(lex)
        state = start or _START[lex[0]]
        path = [state]
        out = []
        for sym in lex:
            o, state = self.transitions[(state, sym)]
            out.append(o)
            path.append(state)
        return "".join(out), path

    def __call__(self, lex: str) -> str:
        out, _ = self.run(lex)
        if self.final_faithful:
            out = out[:-1] + _FAITHFUL[lex[-1]]
        return out


def transduce(lex: str, final_faithful: bool = True) -> str:
    return ToneFST(final_faithful=final_faithful)(lex)


def apply_rules(lex: str, final_faithful: bool = True) -> str:
    """The same mapping written as context rules: h after H, l after L."""
    _check(lex)
    out = [_FAITHFUL[lex[0]]]
    for prev in lex[:-1]:
        out.append("h" if prev == "H" else "l")
    if final_faithful:
        out[-1] = _FAITHFUL[lex[-1]]
    return "".join(out)


def annotate_steps(lex: str, final_faithful: bool = True) -> list[str]:
    """Per-position marks: downstep for H after L, upstep for L after H.

    With ``final_faithful`` the last tone is realised as written, so it
    carries no mark.
    """
    _check(lex)
    marks = [PLAIN]
    for prev, cur in zip(lex, lex[1:]):
        if prev == "L" and cur == "H":
            marks.append(DOWNSTEP)
        elif prev == "H" and cur == "L":
            marks.append(UPSTEP)
        else:
            marks.append(PLAIN)
    if final_faithful and len(marks) > 1:
        marks[-1] = PLAIN
    return marks


def tone_of_label(label: str) -> str | None:
    """Lexical tone carried by a syllable label ending in H or L, else None."""
    s = label.strip()
    if s and s[-1] in "HL":
        return s[-1]
    return None
