"""Tibetan Unicode handling and syllable segmentation.

Running Tibetan text strings syllables together with the tsheg mark
(U+0F0B) as the only in-word delimiter; clauses end in shad (U+0F0D) or
nyis shad (U+0F0E). This module classifies text into runs of syllable
material, Tibetan punctuation, whitespace, and everything else, and is
the substrate for both tokenization strategies.

Classification policy:
  - Tibetan block is U+0F00..U+0FFF; anything outside it is NonTibetan
    (whitespace excepted).
  - Inside the block, letters, combining marks, and digits (general
    categories L*/M*/N*) are syllable material; all remaining signs
    (tsheg, shad, head marks, brackets, ...) are TibetanPunct.
  - A syllable is a maximal span of syllable material.

The single internal text form is canonical composition (NFC). Note that
the precomposed Tibetan consonants (U+0F43, U+0F4D, ...) are composition
exclusions, so canonical form keeps them decomposed.
"""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidTextError

TIBETAN_BLOCK_START = 0x0F00
TIBETAN_BLOCK_END = 0x0FFF

TSHEG = "་"
SHAD = "།"
NYIS_SHAD = "༎"

#: Codepoints that terminate a syllable (plus any whitespace / punctuation).
SEPARATORS = frozenset({TSHEG, SHAD, NYIS_SHAD})


class RunKind(enum.Enum):
    TIBETAN_SYLLABLE = "tibetan_syllable"
    TIBETAN_PUNCT = "tibetan_punct"
    NON_TIBETAN = "non_tibetan"
    WHITESPACE = "whitespace"


@dataclass(frozen=True)
class ScriptRun:
    """A classified, contiguous span of the source string.

    ``start``/``end`` are codepoint offsets into the source; concatenating
    all runs of a segmentation in order reproduces the input exactly.
    """

    kind: RunKind
    text: str
    start: int
    end: int


def is_tibetan(ch: str) -> bool:
    """True if the codepoint lies in the Tibetan Unicode block."""
    return TIBETAN_BLOCK_START <= ord(ch) <= TIBETAN_BLOCK_END


def is_syllable_char(ch: str) -> bool:
    """True for Tibetan letters, combining marks, and digits."""
    return is_tibetan(ch) and unicodedata.category(ch)[0] in "LMN"


def _classify(ch: str) -> RunKind:
    if ch.isspace():
        return RunKind.WHITESPACE
    if not is_tibetan(ch):
        return RunKind.NON_TIBETAN
    if is_syllable_char(ch):
        return RunKind.TIBETAN_SYLLABLE
    return RunKind.TIBETAN_PUNCT


def unicode_normalize(text: str) -> str:
    """Return ``text`` in canonical composition form (NFC).

    Canonical ordering puts Tibetan combining stacks written in divergent
    mark orders into one form. Idempotent. Raises InvalidTextError with
    the position of the first offender if the string contains unpaired
    surrogate codepoints (the only ill-formed sequences a ``str`` can
    carry).
    """
    for i, ch in enumerate(text):
        if 0xD800 <= ord(ch) <= 0xDFFF:
            raise InvalidTextError(
                f"invalid codepoint U+{ord(ch):04X} at position {i}", position=i
            )
    return unicodedata.normalize("NFC", text)


def segment_runs(text: str) -> list[ScriptRun]:
    """Partition ``text`` into maximal same-kind runs.

    Total function: any input (including empty or separator-only strings)
    yields a partition whose concatenation is the input. Expects
    canonically normalized text; see :func:`unicode_normalize`.
    """
    runs: list[ScriptRun] = []
    if not text:
        return runs
    start = 0
    kind = _classify(text[0])
    for i in range(1, len(text)):
        k = _classify(text[i])
        if k is not kind:
            runs.append(ScriptRun(kind, text[start:i], start, i))
            start, kind = i, k
    runs.append(ScriptRun(kind, text[start:], start, len(text)))
    return runs


def segment_syllables(text: str) -> list[str]:
    """Return the Tibetan syllables of ``text``, in order, duplicates kept.

    Exactly the TibetanSyllable runs of :func:`segment_runs`; punctuation,
    whitespace, and non-Tibetan runs are excluded.
    """
    return [r.text for r in segment_runs(text) if r.kind is RunKind.TIBETAN_SYLLABLE]


def count_syllables(text: str) -> int:
    return len(segment_syllables(text))


def join_runs(runs: Iterable[ScriptRun]) -> str:
    """Inverse of :func:`segment_runs`."""
    return "".join(r.text for r in runs)
