"""The governed manifest: one line-delimited JSON record per speech-text
pair, carrying measurements, status, and reject reason.

Rejected records stay in the manifest with their reason; the manifest is
an audit trail, not just a file list. Review decisions annotate records,
they never delete them.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ConfigError


class Status(enum.Enum):
    #: Ingested but not yet run through the pipeline.
    PENDING = "pending"
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    NEEDS_REVIEW = "needs_review"


class RejectReason(enum.Enum):
    FULLY_SILENT = "fully_silent"
    TOO_SHORT = "too_short"
    TOO_LONG = "too_long"
    CLIPPED = "clipped"
    LOW_SNR = "low_snr"
    EMPTY_TEXT = "empty_text"
    RATE_OUTLIER = "rate_outlier"
    REVIEWER_REJECTED = "reviewer_rejected"
    MISSING_AUDIO = "missing_audio"
    DECODE_FAILED = "decode_failed"


class ReviewAction(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    EDIT_TEXT = "edit_text"


@dataclass(frozen=True)
class ReviewDecision:
    record_id: str
    action: ReviewAction
    reviewer: str
    timestamp: str
    edited_text: str | None = None

    def __post_init__(self):
        if self.action is ReviewAction.EDIT_TEXT and not (self.edited_text or "").strip():
            raise ConfigError("edit_text decisions need non-empty edited_text")

    def to_dict(self) -> dict:
        out = {
            "record_id": self.record_id,
            "action": self.action.value,
            "reviewer": self.reviewer,
            "timestamp": self.timestamp,
        }
        if self.edited_text is not None:
            out["edited_text"] = self.edited_text
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ReviewDecision":
        return cls(
            record_id=data["record_id"],
            action=ReviewAction(data["action"]),
            reviewer=data.get("reviewer", ""),
            timestamp=data.get("timestamp", ""),
            edited_text=data.get("edited_text"),
        )


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    audio_path: str
    text_raw: str
    text_normalized: str = ""
    syllable_count: int = 0
    duration_s: float | None = None
    sample_rate: int | None = None
    rms_dbfs: float | None = None
    snr_db: float | None = None
    clipping_ratio: float | None = None
    consistency_z: float | None = None
    status: Status = Status.PENDING
    reject_reason: RejectReason | None = None
    review: ReviewDecision | None = None
    speaker: str | None = None

    def __post_init__(self):
        if self.status is Status.REJECTED and self.reject_reason is None:
            raise ConfigError(f"record {self.id!r}: rejected without a reason")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "audio_path": self.audio_path,
            "text_raw": self.text_raw,
            "text_normalized": self.text_normalized,
            "syllable_count": self.syllable_count,
            "duration_s": self.duration_s,
            "sample_rate": self.sample_rate,
            "rms_dbfs": self.rms_dbfs,
            "snr_db": self.snr_db,
            "clipping_ratio": self.clipping_ratio,
            "consistency_z": self.consistency_z,
            "status": self.status.value,
            "reject_reason": self.reject_reason.value if self.reject_reason else None,
            "review": self.review.to_dict() if self.review else None,
            "speaker": self.speaker,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusRecord":
        return cls(
            id=data["id"],
            audio_path=data["audio_path"],
            text_raw=data.get("text_raw", ""),
            text_normalized=data.get("text_normalized", ""),
            syllable_count=data.get("syllable_count", 0),
            duration_s=data.get("duration_s"),
            sample_rate=data.get("sample_rate"),
            rms_dbfs=data.get("rms_dbfs"),
            snr_db=data.get("snr_db"),
            clipping_ratio=data.get("clipping_ratio"),
            consistency_z=data.get("consistency_z"),
            status=Status(data.get("status", "pending")),
            reject_reason=(
                RejectReason(data["reject_reason"]) if data.get("reject_reason") else None
            ),
            review=(
                ReviewDecision.from_dict(data["review"]) if data.get("review") else None
            ),
            speaker=data.get("speaker"),
        )

    def with_review(self, decision: ReviewDecision, **changes) -> "CorpusRecord":
        return replace(self, review=decision, **changes)


def write_manifest(path: str | Path, records: Iterable[CorpusRecord]) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")
    tmp.replace(path)


def iter_manifest(path: str | Path) -> Iterator[CorpusRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield CorpusRecord.from_dict(json.loads(line))


def read_manifest(path: str | Path) -> list[CorpusRecord]:
    return list(iter_manifest(path))
