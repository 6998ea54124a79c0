"""Tibetan text normalization for corpus cleaning and synthesis input.

Rewrites Arabic digit sequences into Tibetan digits or Tibetan cardinal
words, deletes configured junk codepoints, substitutes configured symbols,
and optionally collapses whitespace. Every rewrite is recorded as an audit
edit so the output can be reproduced from the input mechanically.

Number verbalization is table-driven: the composition rules live in a
lexicon file (see ``data/number_lexicon_bo.txt``) so readings can be
corrected without code changes.
"""

from __future__ import annotations

import enum
import json
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import ConfigError, LexiconError, UnsupportedMagnitudeError
from .script import is_tibetan, unicode_normalize

TIBETAN_DIGIT_ZERO = 0x0F20
VERBALIZE_LIMIT = 10**6

_ASCII_DIGITS = "0123456789"


class DigitPolicy(enum.Enum):
    TO_TIBETAN_DIGITS = "to_tibetan_digits"
    VERBALIZE_CARDINAL = "verbalize_cardinal"


class EditKind(enum.Enum):
    UNICODE = "unicode"
    STRIP = "strip"
    SYMBOL = "symbol"
    DIGITS_TIBETAN = "digits_tibetan"
    DIGITS_VERBALIZED = "digits_verbalized"
    DIGITS_FLAGGED = "digits_flagged"
    WHITESPACE = "whitespace"


@dataclass(frozen=True)
class Edit:
    """One rewrite: source span [start, end) replaced by ``replacement``."""

    start: int
    end: int
    kind: EditKind
    replacement: str


def apply_edits(raw: str, edits: list[Edit]) -> str:
    """Replay an audit trail against the raw string."""
    out: list[str] = []
    pos = 0
    for e in edits:
        out.append(raw[pos:e.start])
        out.append(e.replacement)
        pos = e.end
    out.append(raw[pos:])
    return "".join(out)


@dataclass(frozen=True)
class NormalizedText:
    raw: str
    normalized: str
    edits: tuple[Edit, ...]
    #: Codepoints surviving normalization that are neither Tibetan nor
    #: whitespace, with occurrence counts. Surfaced in quality reports
    #: rather than silently deleted.
    unknown_symbols: tuple[tuple[str, int], ...]
    #: Number of digit sequences too large for the verbalizer (these are
    #: read digit by digit and flagged, never dropped).
    flagged_numbers: int = 0


class NumberLexicon:
    """Cardinal readings for 0..999,999 composed from a lexicon table."""

    _SCALES = (100_000, 10_000, 1_000, 100)

    def __init__(self, entries: Mapping[str, str]):
        self._entries = dict(entries)
        for key in [f"digit.{d}" for d in range(10)] + [
            "scale.10", "scale.100", "scale.1000", "scale.10000",
            "scale.100000", "rule.joiner",
        ]:
            if key not in self._entries:
                raise LexiconError(f"lexicon is missing required entry {key!r}")
        self.joiner = self._entries["rule.joiner"]
        self.connector = self._entries.get("rule.connector", "")
        self.omit_unit_multiplier = (
            self._entries.get("rule.omit_unit_multiplier", "false") == "true"
        )

    @classmethod
    def from_text(cls, text: str) -> "NumberLexicon":
        entries: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise LexiconError(f"malformed lexicon entry on line {lineno}: {line!r}")
            entries[parts[0]] = unicode_normalize(parts[1].strip())
        return cls(entries)

    @classmethod
    def from_file(cls, path: str | Path) -> "NumberLexicon":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "NumberLexicon":
        text = (
            resources.files("bokit")
            .joinpath("data/number_lexicon_bo.txt")
            .read_text(encoding="utf-8")
        )
        return cls.from_text(text)

    def _word(self, key: str) -> str:
        try:
            return self._entries[key]
        except KeyError:
            raise LexiconError(f"lexicon has no entry {key!r}") from None

    def _sub_hundred(self, n: int) -> str:
        assert 0 < n < 100
        tens, unit = divmod(n, 10)
        if tens == 0:
            return self._word(f"digit.{unit}")
        if tens == 1:
            if unit == 0:
                return self._word("scale.10")
            return self._word("scale.10") + self.joiner + self._word(f"digit.{unit}")
        if unit == 0:
            return self._word(f"tens.{tens}")
        return self._word(f"link.{tens}") + self.joiner + self._word(f"digit.{unit}")

    def cardinal(self, value: int) -> str:
        """Compose the reading of ``value`` (0 <= value < 10**6)."""
        if not 0 <= value < VERBALIZE_LIMIT:
            raise UnsupportedMagnitudeError(
                f"verbalizer supports 0..{VERBALIZE_LIMIT - 1}, got {value}"
            )
        override = self._entries.get(f"word.{value}")
        if override is not None:
            return override
        if value == 0:
            return self._word("digit.0")
        parts: list[str] = []
        rest = value
        for scale in self._SCALES:
            d, rest = divmod(rest, scale)
            if d == 0:
                continue
            word = self._word(f"scale.{scale}")
            if d == 1 and self.omit_unit_multiplier:
                parts.append(word)
            else:
                parts.append(self._word(f"digit.{d}") + self.joiner + word)
        if rest:
            tail = self._sub_hundred(rest)
            if parts and self.connector:
                parts.append(self.connector + self.joiner + tail)
            else:
                parts.append(tail)
        return self.joiner.join(parts)

    def digitwise(self, digits: str) -> str:
        """Digit-by-digit reading, the fallback for out-of-range values."""
        return self.joiner.join(self._word(f"digit.{d}") for d in digits)


def verbalize_number(digits: str, lexicon: NumberLexicon | None = None) -> str:
    """Tibetan cardinal reading of an unsigned decimal integer string.

    Raises UnsupportedMagnitudeError for values >= 10**6; callers may fall
    back to :meth:`NumberLexicon.digitwise`.
    """
    if not digits or any(d not in _ASCII_DIGITS for d in digits):
        raise ValueError(f"expected an unsigned decimal string, got {digits!r}")
    lex = lexicon or NumberLexicon.default()
    return lex.cardinal(int(digits))


@dataclass(frozen=True)
class NormalizationConfig:
    digit_policy: DigitPolicy = DigitPolicy.TO_TIBETAN_DIGITS
    symbol_map: Mapping[str, str] = field(default_factory=dict)
    strip_set: frozenset[str] = frozenset()
    collapse_whitespace: bool = False

    def __post_init__(self):
        object.__setattr__(self, "symbol_map", dict(self.symbol_map))
        object.__setattr__(self, "strip_set", frozenset(self.strip_set))
        self._validate()

    def _validate(self) -> None:
        for ch in self.strip_set:
            if len(ch) != 1:
                raise ConfigError(f"strip_set members must be single codepoints: {ch!r}")
            if ch in _ASCII_DIGITS:
                raise ConfigError("digits are owned by digit_policy, not strip_set")
        overlap = set(self.symbol_map) & self.strip_set
        if overlap:
            raise ConfigError(f"symbol_map keys overlap strip_set: {sorted(overlap)}")
        for key, rep in self.symbol_map.items():
            if not key:
                raise ConfigError("symbol_map keys must be non-empty")
            if any(d in key for d in _ASCII_DIGITS):
                raise ConfigError(f"symbol_map key {key!r} contains a digit")
            if self.collapse_whitespace and any(ch.isspace() for ch in key):
                raise ConfigError(
                    f"symbol_map key {key!r} contains whitespace, which "
                    f"collapse_whitespace would consume first"
                )
            for ch in rep:
                if not (is_tibetan(ch) or ch.isspace()):
                    raise ConfigError(
                        f"replacement for {key!r} contains non-Tibetan codepoint "
                        f"U+{ord(ch):04X}"
                    )
            # Idempotence guards: the output must not re-trigger rewrites.
            for other in self.symbol_map:
                if other in rep:
                    raise ConfigError(
                        f"replacement for {key!r} contains symbol_map key {other!r}"
                    )
            if any(ch in self.strip_set for ch in rep):
                raise ConfigError(f"replacement for {key!r} contains a stripped codepoint")
            if self.collapse_whitespace and (
                rep == "" or rep != rep.strip() or "  " in rep
            ):
                raise ConfigError(
                    f"replacement for {key!r} would fight whitespace collapsing; "
                    f"use strip_set for deletions"
                )

    @classmethod
    def from_dict(cls, data: Mapping) -> "NormalizationConfig":
        known = {"digit_policy", "symbol_map", "strip_set", "collapse_whitespace"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown normalization config keys: {sorted(unknown)}")
        kwargs: dict = {}
        if "digit_policy" in data:
            try:
                kwargs["digit_policy"] = DigitPolicy(data["digit_policy"])
            except ValueError:
                raise ConfigError(
                    f"digit_policy must be one of "
                    f"{[p.value for p in DigitPolicy]}, got {data['digit_policy']!r}"
                ) from None
        if "symbol_map" in data:
            kwargs["symbol_map"] = dict(data["symbol_map"])
        if "strip_set" in data:
            kwargs["strip_set"] = frozenset(data["strip_set"])
        if "collapse_whitespace" in data:
            kwargs["collapse_whitespace"] = bool(data["collapse_whitespace"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "NormalizationConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "digit_policy": self.digit_policy.value,
            "symbol_map": dict(self.symbol_map),
            "strip_set": sorted(self.strip_set),
            "collapse_whitespace": self.collapse_whitespace,
        }


def _tibetan_digits(run: str) -> str:
    return "".join(chr(TIBETAN_DIGIT_ZERO + int(d)) for d in run)


def normalize_text(
    text: str,
    config: NormalizationConfig | None = None,
    lexicon: NumberLexicon | None = None,
) -> NormalizedText:
    """Normalize ``text`` under ``config`` with a complete audit trail.

    Deterministic for a fixed config; applying the returned edits to the
    raw input reproduces the normalized output exactly; re-normalizing the
    output is a no-op. Digit sequences a verbalizer cannot handle are read
    digit by digit and counted in ``flagged_numbers``.
    """
    config = config or NormalizationConfig()
    raw = text
    u = unicode_normalize(raw)
    # Longest symbol first so e.g. "%%" wins over "%".
    symbols = sorted(config.symbol_map, key=len, reverse=True)
    need_lexicon = config.digit_policy is DigitPolicy.VERBALIZE_CARDINAL
    lex = (lexicon or NumberLexicon.default()) if need_lexicon else lexicon

    edits: list[Edit] = []
    out: list[str] = []
    flagged = 0
    i = 0
    n = len(u)

    def emit(start: int, end: int, kind: EditKind, replacement: str) -> None:
        if u[start:end] != replacement:
            edits.append(Edit(start, end, kind, replacement))
        out.append(replacement)

    def is_junk(ch: str) -> bool:
        # Under collapsing, strippables adjacent to whitespace must be
        # consumed together, or a deletion would leave edge/double spaces.
        return ch.isspace() or ch in config.strip_set

    while i < n:
        ch = u[i]
        matched = next((s for s in symbols if u.startswith(s, i)), None)
        if matched is not None:
            emit(i, i + len(matched), EditKind.SYMBOL, config.symbol_map[matched])
            i += len(matched)
        elif config.collapse_whitespace and is_junk(ch):
            j = i
            while j < n and is_junk(u[j]):
                j += 1
            run = u[i:j]
            had_ws = any(c.isspace() for c in run)
            if not had_ws:
                emit(i, j, EditKind.STRIP, "")
            else:
                at_edge = i == 0 or j == n
                emit(i, j, EditKind.WHITESPACE, "" if at_edge else " ")
            i = j
        elif ch in config.strip_set:
            emit(i, i + 1, EditKind.STRIP, "")
            i += 1
        elif ch in _ASCII_DIGITS:
            j = i
            while j < n and u[j] in _ASCII_DIGITS:
                j += 1
            run = u[i:j]
            if config.digit_policy is DigitPolicy.TO_TIBETAN_DIGITS:
                emit(i, j, EditKind.DIGITS_TIBETAN, _tibetan_digits(run))
            elif int(run) < VERBALIZE_LIMIT:
                emit(i, j, EditKind.DIGITS_VERBALIZED, lex.cardinal(int(run)))
            else:
                emit(i, j, EditKind.DIGITS_FLAGGED, lex.digitwise(run))
                flagged += 1
            i = j
        else:
            out.append(ch)
            i += 1

    normalized = "".join(out)
    recomposed = unicodedata.normalize("NFC", normalized)
    if raw != u or recomposed != normalized:
        # Either the input was not in canonical form, or a deletion created
        # a new composition opportunity across an edit boundary. Fine-grained
        # spans cannot line up with the raw string in these cases, so record
        # one canonicalizing rewrite covering the whole input.
        normalized = recomposed
        edits = [Edit(0, len(raw), EditKind.UNICODE, normalized)]

    unknown = Counter(
        ch for ch in normalized if not (is_tibetan(ch) or ch.isspace())
    )
    return NormalizedText(
        raw=raw,
        normalized=normalized,
        edits=tuple(edits),
        unknown_symbols=tuple(sorted(unknown.items())),
        flagged_numbers=flagged,
    )


def default_synthesis_config() -> NormalizationConfig:
    """Verbalizing config for synthesis input (numbers read out in full)."""
    return NormalizationConfig(digit_policy=DigitPolicy.VERBALIZE_CARDINAL)
