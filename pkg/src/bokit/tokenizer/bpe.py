"""Corpus-trained BPE tokenization, scoped to Tibetan syllables.

Merges are learned and applied strictly inside syllables, so subword
units never straddle a tsheg: separators, punctuation, whitespace, and
non-Tibetan codepoints stay single-codepoint units. Because those
boundary codepoints are ordinary vocabulary entries, decoding is plain
concatenation and re-materializes every syllable boundary exactly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import (
    EmptyCorpusError,
    InvalidTokenIdError,
    ModelFormatError,
    TargetTooSmallError,
)
from ..script import RunKind, segment_runs
from .common import (
    BOS_ID,
    EOS_ID,
    MODEL_FORMAT_VERSION,
    NUM_SPECIALS,
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

MIN_PAIR_FREQUENCY = 2


@dataclass(frozen=True)
class BpeModel:
    """Vocabulary plus the ordered merge list that produced it.

    ids are dense: specials 0..4, then every single-codepoint unit seen at
    training time (codepoint order), then one entry per merge in merge
    order.
    """

    id_to_token: tuple[str, ...]
    merges: tuple[tuple[str, str], ...]
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
            "strategy": Strategy.BPE.value,
            "specials": specials_dict(),
            "vocab": list(self.id_to_token),
            "merges": [list(m) for m in self.merges],
        })

    @classmethod
    def load(cls, path: str | Path) -> "BpeModel":
        data = read_model_file(path)
        vocab = data.get("vocab", [])
        check_vocab(vocab, path)
        merges = tuple((m[0], m[1]) for m in data.get("merges", []))
        model = cls(id_to_token=tuple(vocab), merges=merges)
        for left, right in merges:
            if left + right not in model.token_to_id:
                raise ModelFormatError(
                    f"model file {path} has a merge ({left!r}, {right!r}) "
                    f"whose result is missing from the vocabulary"
                )
        return model


def _merge_pair(units: list[str], left: str, right: str) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(units):
        if i + 1 < len(units) and units[i] == left and units[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(units[i])
            i += 1
    return out


def bpe_train(corpus: Iterable[str], target_vocab_size: int) -> BpeModel:
    """Greedy BPE over syllable-internal codepoint pairs.

    Repeatedly merges the most frequent adjacent pair (ties broken by the
    lexicographically smallest (left, right) pair) until the vocabulary
    reaches ``target_vocab_size`` or no pair occurs at least twice.
    Deterministic: one corpus, one parameter set, one model.
    """
    lines = list(corpus)
    if not lines:
        raise EmptyCorpusError("cannot train BPE on an empty corpus")

    syllable_counts: Counter[str] = Counter()
    base_units: set[str] = set()
    for line in lines:
        base_units.update(line)
        for run in segment_runs(line):
            if run.kind is RunKind.TIBETAN_SYLLABLE:
                syllable_counts[run.text] += 1

    floor = NUM_SPECIALS + len(base_units)
    if target_vocab_size <= floor:
        raise TargetTooSmallError(
            f"target_vocab_size must exceed {floor} "
            f"({NUM_SPECIALS} specials + {len(base_units)} base units), "
            f"got {target_vocab_size}"
        )

    # Working state: one unit list per distinct syllable, weighted by count.
    sequences: dict[str, list[str]] = {s: list(s) for s in syllable_counts}
    merges: list[tuple[str, str]] = []
    vocab_size = floor

    while vocab_size < target_vocab_size:
        pair_counts: Counter[tuple[str, str]] = Counter()
        for syl, units in sequences.items():
            weight = syllable_counts[syl]
            for a, b in zip(units, units[1:]):
                pair_counts[(a, b)] += weight
        if not pair_counts:
            break
        best_count = max(pair_counts.values())
        if best_count < MIN_PAIR_FREQUENCY:
            break
        best = min(p for p, c in pair_counts.items() if c == best_count)
        merges.append(best)
        vocab_size += 1
        for syl, units in sequences.items():
            if len(units) > 1:
                sequences[syl] = _merge_pair(units, *best)

    vocab = (
        SPECIAL_TOKENS
        + tuple(sorted(base_units))
        + tuple(left + right for left, right in merges)
    )
    return BpeModel(id_to_token=vocab, merges=tuple(merges))


def _encode_units(model: BpeModel, text: str) -> list[str]:
    units: list[str] = []
    for run in segment_runs(text):
        if run.kind is RunKind.TIBETAN_SYLLABLE:
            parts = list(run.text)
            for left, right in model.merges:
                if len(parts) > 1:
                    parts = _merge_pair(parts, left, right)
            units.extend(parts)
        else:
            units.extend(run.text)
    return units


def bpe_encode(model: BpeModel, text: str) -> TokenSequence:
    """Encode normalized text; unknown codepoints map to UNK."""
    ids = [BOS_ID]
    for unit in _encode_units(model, text):
        ids.append(model.token_to_id.get(unit, UNK_ID))
    ids.append(EOS_ID)
    return TokenSequence(ids=tuple(ids), strategy=Strategy.BPE)


def bpe_decode(model: BpeModel, tokens: TokenSequence | Sequence[int]) -> str:
    """Concatenate token strings; framing specials drop, UNK renders as a
    replacement mark, invalid ids raise with their position."""
    ids = tokens.ids if isinstance(tokens, TokenSequence) else tuple(tokens)
    parts: list[str] = []
    for pos, i in enumerate(ids):
        if not 0 <= i < len(model.id_to_token):
            raise InvalidTokenIdError(
                f"token id {i} at position {pos} is outside the vocabulary",
                position=pos,
            )
        if i in (PAD_ID, BOS_ID, EOS_ID, SEP_ID):
            continue
        if i == UNK_ID:
            parts.append(UNK_MARK)
        else:
            parts.append(model.id_to_token[i])
    return "".join(parts)
