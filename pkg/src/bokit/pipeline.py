"""End-to-end corpus governance: ingest raw multi-source data, run the
audio/text/consistency stages, emit the governed manifest plus a quality
summary, and export fine-tune-ready token dumps.

Stage order per record: decode -> resample -> trim -> loudness-normalize ->
measure -> gates (duration, clipping, SNR) -> text normalization ->
syllable count -> corpus-level consistency verdict. Loudness follows
trimming so leading silence cannot bias the RMS. Clipping is gated on the
decoded input, because loudness normalization would otherwise attenuate
the evidence below the detector.

Records are processed independently (optionally in parallel); results are
assembled in input order, so output is deterministic regardless of worker
count. Per-record failures become Rejected records, never crashes.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from . import audio as adsp
from .config import PipelineConfig
from .consistency import Decision, verify_corpus
from .errors import (
    AllZeroInputError,
    FullySilentError,
    MalformedHeaderError,
    NoAcceptedRecordsError,
    UnreadableIndexError,
    UnsupportedEncodingError,
)
from .manifest import CorpusRecord, RejectReason, Status, write_manifest
from .normalize import normalize_text
from .script import count_syllables
from .tokenizer import BpeModel, SyllableVocab, encode as tok_encode

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QualitySummary:
    total: int
    by_status: dict[str, int]
    by_reject_reason: dict[str, int]
    unknown_symbols: dict[str, int]
    flagged_numbers: int

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "by_status": dict(self.by_status),
            "by_reject_reason": dict(self.by_reject_reason),
            "unknown_symbols": dict(self.unknown_symbols),
            "flagged_numbers": self.flagged_numbers,
        }


def ingest(index_path: str | Path, audio_root: str | Path) -> list[CorpusRecord]:
    """Build pending records from a transcript index.

    The index is either tab-separated (id, relative audio path, transcript,
    optional speaker) or line-delimited JSON objects with keys id/audio/
    text and optional speaker. Records whose audio file is missing are
    ingested as Rejected, never dropped; duplicate ids keep the first
    occurrence and log a warning.
    """
    index_path = Path(index_path)
    audio_root = Path(audio_root)
    try:
        lines = index_path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise UnreadableIndexError(f"cannot read index {index_path}: {exc}") from exc

    records: list[CorpusRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.lstrip().startswith("{"):
            line = line.strip()
            try:
                row = json.loads(line)
                rid, rel, text = row["id"], row["audio"], row["text"]
                speaker = row.get("speaker")
            except (json.JSONDecodeError, KeyError) as exc:
                raise UnreadableIndexError(
                    f"{index_path}:{lineno}: bad JSON index line: {exc}"
                ) from exc
        else:
            parts = line.split("\t")
            if len(parts) < 3:
                raise UnreadableIndexError(
                    f"{index_path}:{lineno}: expected id<TAB>audio<TAB>text"
                )
            rid, rel, text = parts[0], parts[1], parts[2]
            speaker = parts[3] if len(parts) > 3 and parts[3] else None
        if rid in seen:
            log.warning("duplicate id %r at %s:%d, keeping first", rid, index_path, lineno)
            continue
        seen.add(rid)
        path = audio_root / rel
        if path.is_file():
            records.append(CorpusRecord(
                id=rid, audio_path=str(path), text_raw=text, speaker=speaker,
            ))
        else:
            records.append(CorpusRecord(
                id=rid, audio_path=str(path), text_raw=text, speaker=speaker,
                status=Status.REJECTED, reject_reason=RejectReason.MISSING_AUDIO,
            ))
    return records


@dataclass
class _Stage1Result:
    record: CorpusRecord
    rate: float | None = None
    unknown_symbols: tuple[tuple[str, int], ...] = ()
    flagged_numbers: int = 0


def _process_record(
    record: CorpusRecord, config: PipelineConfig, audio_dir: Path
) -> _Stage1Result:
    if record.status is Status.REJECTED:
        return _Stage1Result(record=record)

    def rejected(reason: RejectReason, **fields) -> _Stage1Result:
        return _Stage1Result(
            record=replace(record, status=Status.REJECTED, reject_reason=reason, **fields)
        )

    try:
        buf = adsp.read_wav(record.audio_path)
    except FileNotFoundError:
        return rejected(RejectReason.MISSING_AUDIO)
    except (MalformedHeaderError, UnsupportedEncodingError) as exc:
        log.info("record %s: %s", record.id, exc)
        return rejected(RejectReason.DECODE_FAILED)

    raw_clipping = float((abs(buf.samples) >= adsp.CLIPPING_LEVEL).mean())
    buf = adsp.resample(buf, config.target_sample_rate)
    try:
        buf = adsp.trim_silence(buf, config.trim_threshold_dbfs, config.trim_pad_ms)
        buf = adsp.normalize_loudness(buf, config.loudness_target_dbfs)
    except (FullySilentError, AllZeroInputError):
        return rejected(RejectReason.FULLY_SILENT)

    report = adsp.measure_quality(buf)
    measured = dict(
        duration_s=report.duration_s,
        sample_rate=config.target_sample_rate,
        rms_dbfs=report.rms_dbfs,
        snr_db=report.snr_db,
        clipping_ratio=raw_clipping,
    )
    if report.duration_s < config.min_duration_s:
        return rejected(RejectReason.TOO_SHORT, **measured)
    if report.duration_s > config.max_duration_s:
        return rejected(RejectReason.TOO_LONG, **measured)
    if raw_clipping > config.max_clipping_ratio:
        return rejected(RejectReason.CLIPPED, **measured)
    if report.snr_db < config.min_snr_db:
        return rejected(RejectReason.LOW_SNR, **measured)

    norm = normalize_text(record.text_raw, config.normalization)
    syllables = count_syllables(norm.normalized)
    text_fields = dict(
        text_normalized=norm.normalized, syllable_count=syllables, **measured
    )
    if syllables == 0:
        return _Stage1Result(
            record=replace(
                record, status=Status.REJECTED,
                reject_reason=RejectReason.EMPTY_TEXT, **text_fields,
            ),
            unknown_symbols=norm.unknown_symbols,
            flagged_numbers=norm.flagged_numbers,
        )

    processed_path = audio_dir / f"{record.id}.wav"
    adsp.write_wav(processed_path, buf)
    return _Stage1Result(
        record=replace(record, audio_path=str(processed_path), **text_fields),
        rate=syllables / report.duration_s,
        unknown_symbols=norm.unknown_symbols,
        flagged_numbers=norm.flagged_numbers,
    )


def run_pipeline(
    records: Sequence[CorpusRecord],
    config: PipelineConfig,
    out_dir: str | Path,
) -> tuple[list[CorpusRecord], QualitySummary]:
    """Run every stage over ``records``, writing the governed outputs.

    Produces ``manifest.jsonl``, ``summary.json``, and processed audio
    under ``audio/`` inside ``out_dir``. Returns the final records (input
    order) and the summary.
    """
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    out_dir.mkdir(parents=True, exist_ok=True)
    audio_dir.mkdir(parents=True, exist_ok=True)

    if config.workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            stage1 = list(pool.map(
                lambda r: _process_record(r, config, audio_dir), records
            ))
    else:
        stage1 = [_process_record(r, config, audio_dir) for r in records]

    # Corpus-level consistency over the records that survived stage one.
    survivors = [i for i, s in enumerate(stage1) if s.rate is not None]
    verdicts = verify_corpus(
        [stage1[i].rate for i in survivors],
        [stage1[i].record.speaker for i in survivors],
        config.consistency,
    )
    final: list[CorpusRecord] = [s.record for s in stage1]
    for i, verdict in zip(survivors, verdicts):
        rec = replace(stage1[i].record, consistency_z=verdict.z_robust)
        if verdict.decision is Decision.ACCEPT:
            rec = replace(rec, status=Status.ACCEPTED)
        elif verdict.decision is Decision.REVIEW:
            rec = replace(rec, status=Status.NEEDS_REVIEW)
        else:
            processed = Path(rec.audio_path)
            if processed.is_file():
                processed.unlink()
            rec = replace(
                rec, status=Status.REJECTED,
                reject_reason=RejectReason.RATE_OUTLIER,
                audio_path=records[i].audio_path,
            )
        final[i] = rec

    unknown: Counter[str] = Counter()
    flagged = 0
    for s in stage1:
        unknown.update(dict(s.unknown_symbols))
        flagged += s.flagged_numbers
    summary = QualitySummary(
        total=len(final),
        by_status=dict(Counter(r.status.value for r in final)),
        by_reject_reason=dict(Counter(
            r.reject_reason.value for r in final if r.reject_reason
        )),
        unknown_symbols=dict(sorted(unknown.items())),
        flagged_numbers=flagged,
    )
    write_manifest(out_dir / "manifest.jsonl", final)
    (out_dir / "summary.json").write_text(
        json.dumps(summary.to_dict(), ensure_ascii=False, indent=1) + "\n",
        encoding="utf-8",
    )
    return final, summary


def export_finetune(
    records: Iterable[CorpusRecord],
    model: SyllableVocab | BpeModel,
    out_path: str | Path,
) -> int:
    """Write the fine-tune token dump: one Accepted record per line as
    id, audio path, space-separated token ids. Returns the line count."""
    accepted = [r for r in records if r.status is Status.ACCEPTED]
    if not accepted:
        raise NoAcceptedRecordsError("no accepted records to export")
    out_path = Path(out_path)
    with open(out_path, "w", encoding="utf-8") as fh:
        for rec in accepted:
            ids = tok_encode(model, rec.text_normalized).ids
            fh.write(f"{rec.id}\t{rec.audio_path}\t{' '.join(map(str, ids))}\n")
    log.info("exported %d accepted records to %s", len(accepted), out_path)
    return len(accepted)
