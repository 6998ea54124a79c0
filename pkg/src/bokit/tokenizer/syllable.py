"""Syllable-level tokenization: whole syllables as modeling units, with an
explicit separator token between them."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import EmptyCorpusError, InvalidTokenIdError
from ..script import TSHEG, RunKind, segment_runs
from .common import (
    BOS_ID,
    EOS_ID,
    MODEL_FORMAT_VERSION,
    PAD_ID,
    SEP_ID,
    SPECIAL_TOKENS,
    UNK_ID,
    UNK_MARK,
    Strategy,
    TokenSequence,
    check_vocab,
    read_model_file,
    specials_dict,
    write_model_file,
)


@dataclass(frozen=True)
class SyllableVocab:
    """Dense syllable -> id mapping; ids 0..4 are the reserved specials."""

    id_to_token: tuple[str, ...]
    token_to_id: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "token_to_id", {t: i for i, t in enumerate(self.id_to_token)}
        )

    def __len__(self) -> int:
        return len(self.id_to_token)

    def save(self, path: str | Path) -> None:
        write_model_file(path, {
            "format_version": MODEL_FORMAT_VERSION,
            "strategy": Strategy.SYLLABLE.value,
            "specials": specials_dict(),
            "vocab": list(self.id_to_token),
        })

    @classmethod
    def load(cls, path: str | Path) -> "SyllableVocab":
        data = read_model_file(path)
        vocab = data.get("vocab", [])
        check_vocab(vocab, path)
        return cls(id_to_token=tuple(vocab))


def syllable_vocab_build(
    corpus: Iterable[str], min_count: int = 1
) -> SyllableVocab:
    """Build a syllable vocabulary from normalized corpus lines.

    Keeps syllables with frequency >= min_count, ordered by descending
    frequency with codepoint order breaking ties; rarer syllables map to
    UNK at encode time.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    lines = list(corpus)
    if not lines:
        raise EmptyCorpusError("cannot build a vocabulary from an empty corpus")
    counts: Counter[str] = Counter()
    for line in lines:
        for run in segment_runs(line):
            if run.kind is RunKind.TIBETAN_SYLLABLE:
                counts[run.text] += 1
    kept = sorted(
        (s for s, c in counts.items() if c >= min_count),
        key=lambda s: (-counts[s], s),
    )
    return SyllableVocab(id_to_token=SPECIAL_TOKENS + tuple(kept))


def _units(text: str) -> list[str | None]:
    """Syllables in order; None marks a non-Tibetan run (one UNK each)."""
    units: list[str | None] = []
    for run in segment_runs(text):
        if run.kind is RunKind.TIBETAN_SYLLABLE:
            units.append(run.text)
        elif run.kind is RunKind.NON_TIBETAN:
            units.append(None)
    return units


def syllable_encode(vocab: SyllableVocab, text: str) -> TokenSequence:
    """Encode normalized text as [BOS, s1, SEP, s2, ..., sn, EOS]."""
    ids = [BOS_ID]
    for pos, unit in enumerate(_units(text)):
        if pos:
            ids.append(SEP_ID)
        if unit is None:
            ids.append(UNK_ID)
        else:
            ids.append(vocab.token_to_id.get(unit, UNK_ID))
    ids.append(EOS_ID)
    return TokenSequence(ids=tuple(ids), strategy=Strategy.SYLLABLE)


def syllable_decode(vocab: SyllableVocab, tokens: TokenSequence | Sequence[int]) -> str:
    """Inverse of :func:`syllable_encode`; SEP re-materializes as tsheg."""
    ids = tokens.ids if isinstance(tokens, TokenSequence) else tuple(tokens)
    parts: list[str] = []
    for pos, i in enumerate(ids):
        if not 0 <= i < len(vocab.id_to_token):
            raise InvalidTokenIdError(
                f"token id {i} at position {pos} is outside the vocabulary",
                position=pos,
            )
        if i in (PAD_ID, BOS_ID, EOS_ID):
            continue
        if i == SEP_ID:
            parts.append(TSHEG)
        elif i == UNK_ID:
            parts.append(UNK_MARK)
        else:
            parts.append(vocab.id_to_token[i])
    return "".join(parts)
