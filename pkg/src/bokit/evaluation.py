"""Evaluation metrics and reporting: syllable-level pronunciation accuracy
from edit alignment, MOS aggregation from rating files, and the
three-column report table.

Hypothesis syllable sequences come from human transcriptions of
synthesized audio ingested as text; accuracy is 100 * (1 - syllable error
rate), floored at zero because insertions can outnumber reference
syllables.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConfigError,
    EmptyReferenceError,
    OutOfRangeScoreError,
)
from .normalize import NormalizationConfig, normalize_text
from .script import segment_syllables
from .tokenizer import TokenStats


@dataclass(frozen=True)
class EditCounts:
    substitutions: int
    deletions: int
    insertions: int
    ref_length: int

    @property
    def total(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def __add__(self, other: "EditCounts") -> "EditCounts":
        return EditCounts(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.ref_length + other.ref_length,
        )


def edit_counts(ref: Sequence[str], hyp: Sequence[str]) -> EditCounts:
    """Substitution/deletion/insertion counts of one minimum-edit alignment.

    Ties between alignments are broken match/substitution first, then
    deletion, then insertion, so the decomposition is deterministic; the
    total always equals the Levenshtein distance.
    """
    rows = len(ref) + 1
    cols = len(hyp) + 1
    # cost[i][j] = (total, subs, dels, inss) aligning ref[:i] with hyp[:j]
    cost = [[(0, 0, 0, 0)] * cols for _ in range(rows)]
    for i in range(1, rows):
        cost[i][0] = (i, 0, i, 0)
    for j in range(1, cols):
        cost[0][j] = (j, 0, 0, j)
    for i in range(1, rows):
        for j in range(1, cols):
            diag_t, diag_s, diag_d, diag_i = cost[i - 1][j - 1]
            if ref[i - 1] == hyp[j - 1]:
                best = (diag_t, diag_s, diag_d, diag_i)
            else:
                best = (diag_t + 1, diag_s + 1, diag_d, diag_i)
            up_t, up_s, up_d, up_i = cost[i - 1][j]
            if up_t + 1 < best[0]:
                best = (up_t + 1, up_s, up_d + 1, up_i)
            left_t, left_s, left_d, left_i = cost[i][j - 1]
            if left_t + 1 < best[0]:
                best = (left_t + 1, left_s, left_d, left_i + 1)
            cost[i][j] = best
    total, subs, dels, inss = cost[len(ref)][len(hyp)]
    return EditCounts(subs, dels, inss, len(ref))


def accuracy_from_counts(counts: EditCounts) -> float:
    """100 * max(0, 1 - (S+D+I)/N)."""
    if counts.ref_length == 0:
        raise EmptyReferenceError("reference has no syllables")
    return 100.0 * max(0.0, 1.0 - counts.total / counts.ref_length)


def syllable_accuracy(ref: Sequence[str], hyp: Sequence[str]) -> float:
    """Pronunciation accuracy of one utterance over syllable sequences."""
    if len(ref) == 0:
        raise EmptyReferenceError("reference has no syllables")
    return accuracy_from_counts(edit_counts(ref, hyp))


def corpus_syllable_accuracy(
    pairs: Iterable[tuple[Sequence[str], Sequence[str]]],
) -> float:
    """Pool edit counts over utterances; no cross-utterance alignment."""
    pooled = EditCounts(0, 0, 0, 0)
    for ref, hyp in pairs:
        if len(ref) == 0:
            raise EmptyReferenceError("reference has no syllables")
        pooled = pooled + edit_counts(ref, hyp)
    return accuracy_from_counts(pooled)


# --- MOS aggregation --------------------------------------------------------


@dataclass(frozen=True)
class Rating:
    system: str
    rater: str
    utterance_id: str
    score: float


@dataclass(frozen=True)
class MosSummary:
    mean: float
    ci95: float
    n_ratings: int
    n_raters: int
    n_utterances: int


def aggregate_mos(ratings: Sequence[Rating]) -> dict[str, MosSummary]:
    """Mean and 95% confidence half-width per system.

    ci95 = 1.96 * sample standard deviation / sqrt(n); zero for a single
    rating. Scores outside [1, 5] raise with their location.
    """
    by_system: dict[str, list[Rating]] = {}
    for r in ratings:
        if not 1.0 <= r.score <= 5.0:
            raise OutOfRangeScoreError(
                f"score {r.score} for system {r.system!r} "
                f"(rater {r.rater!r}, utterance {r.utterance_id!r}) "
                f"is outside [1, 5]",
                system=r.system, rater=r.rater, utterance_id=r.utterance_id,
            )
        by_system.setdefault(r.system, []).append(r)
    out: dict[str, MosSummary] = {}
    for system, rows in by_system.items():
        scores = [r.score for r in rows]
        n = len(scores)
        mean = sum(scores) / n
        if n > 1:
            var = sum((s - mean) ** 2 for s in scores) / (n - 1)
            ci95 = 1.96 * math.sqrt(var) / math.sqrt(n)
        else:
            ci95 = 0.0
        out[system] = MosSummary(
            mean=mean,
            ci95=ci95,
            n_ratings=n,
            n_raters=len({r.rater for r in rows}),
            n_utterances=len({r.utterance_id for r in rows}),
        )
    return out


def read_ratings(path: str | Path) -> list[Rating]:
    """Read a delimited ratings file: system, rater, utterance_id, score."""
    return [
        Rating(
            system=row["system"],
            rater=row["rater"],
            utterance_id=row["utterance_id"],
            score=float(row["score"]),
        )
        for row in _read_delimited(path, {"system", "rater", "utterance_id", "score"})
    ]


def read_transcription_pairs(path: str | Path) -> list[tuple[str, str, str]]:
    """Read (utterance_id, ref_text, hyp_text) rows."""
    return [
        (row["utterance_id"], row["ref_text"], row["hyp_text"])
        for row in _read_delimited(path, {"utterance_id", "ref_text", "hyp_text"})
    ]


def _read_delimited(path: str | Path, required: set[str]) -> list[dict]:
    text = Path(path).read_text(encoding="utf-8")
    delimiter = "\t" if "\t" in text.splitlines()[0] else ","
    reader = csv.DictReader(io.StringIO(text), delimiter=delimiter)
    missing = required - set(reader.fieldnames or [])
    if missing:
        raise ConfigError(f"{path} lacks required columns: {sorted(missing)}")
    return list(reader)


def pairs_to_syllables(
    pairs: Sequence[tuple[str, str, str]],
    config: NormalizationConfig | None = None,
) -> list[tuple[list[str], list[str]]]:
    """Normalize then syllable-segment both sides of each pair."""
    config = config or NormalizationConfig()
    out = []
    for _, ref_text, hyp_text in pairs:
        ref = segment_syllables(normalize_text(ref_text, config).normalized)
        hyp = segment_syllables(normalize_text(hyp_text, config).normalized)
        out.append((ref, hyp))
    return out


# --- Report -----------------------------------------------------------------


@dataclass(frozen=True)
class EvalRow:
    name: str
    mos_mean: float
    mos_ci95: float
    syllable_accuracy_pct: float
    n_raters: int
    n_utterances: int

    def __post_init__(self):
        if not 1.0 <= self.mos_mean <= 5.0:
            raise OutOfRangeScoreError(
                f"row {self.name!r}: MOS mean {self.mos_mean} outside [1, 5]",
                system=self.name,
            )
        if not 0.0 <= self.syllable_accuracy_pct <= 100.0:
            raise ValueError(
                f"row {self.name!r}: accuracy {self.syllable_accuracy_pct} "
                f"outside [0, 100]"
            )


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    token_stats: Mapping[str, TokenStats] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "name": r.name,
                    "mos_mean": r.mos_mean,
                    "mos_ci95": r.mos_ci95,
                    "syllable_accuracy_pct": r.syllable_accuracy_pct,
                    "n_raters": r.n_raters,
                    "n_utterances": r.n_utterances,
                }
                for r in self.rows
            ],
            "token_stats": {k: v.to_dict() for k, v in self.token_stats.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=1)

    @classmethod
    def from_dict(cls, data: Mapping) -> "EvalReport":
        rows = tuple(EvalRow(**row) for row in data.get("rows", []))
        stats = {
            k: TokenStats(**v) for k, v in (data.get("token_stats") or {}).items()
        }
        return cls(rows=rows, token_stats=stats)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_dict(json.loads(text))


def render_report(report: EvalReport) -> str:
    """Fixed-width text table with columns System / MOS / Syllable Accuracy (%)."""
    if not report.rows:
        raise ValueError("report needs at least one row")
    headers = ("System", "MOS", "Syllable Accuracy (%)")
    cells = [
        (r.name, f"{r.mos_mean:.2f}", f"{r.syllable_accuracy_pct:.1f}")
        for r in report.rows
    ]
    widths = [
        max(len(headers[c]), *(len(row[c]) for row in cells)) for c in range(3)
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"
