"""Local HTTP service backing the human quality-inspection stage.

Serves the NeedsReview queue and processed audio, persists review
decisions, and hosts the review UI's static assets. Decisions append to a
journal and are fsync'd before the response goes out, so an interrupted
session never loses an acknowledged decision; the journal is merged back
into the manifest on the next load.

Endpoints (JSON unless noted):
    GET  /queue?offset&limit   page of NeedsReview records + total
    GET  /records/{id}         one record
    GET  /audio/{id}           processed WAV bytes
    POST /decisions            apply a ReviewDecision
    GET  /...                  static assets of the review UI

Error bodies carry {"category", "message", "id"?}. Binds to loopback by
default: this is a local tool over private data.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import os
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .errors import (
    BokitError,
    InvalidEditError,
    NotReviewableError,
    UnknownIdError,
)
from .manifest import (
    CorpusRecord,
    RejectReason,
    ReviewAction,
    ReviewDecision,
    Status,
    read_manifest,
    write_manifest,
)
from .normalize import NormalizationConfig, normalize_text
from .script import count_syllables

log = logging.getLogger(__name__)

QUEUE_FIELDS = (
    "id", "text_normalized", "duration_s", "consistency_z",
    "rms_dbfs", "snr_db", "clipping_ratio", "status",
)


def journal_path(manifest_path: str | Path) -> Path:
    p = Path(manifest_path)
    return p.with_name(p.stem + ".decisions.jsonl")


class ReviewSession:
    """Manifest + decision journal with serialized, durable writes."""

    def __init__(
        self,
        manifest_path: str | Path,
        normalization: NormalizationConfig | None = None,
    ):
        self.manifest_path = Path(manifest_path)
        self.journal = journal_path(manifest_path)
        self.normalization = normalization or NormalizationConfig()
        self._lock = threading.Lock()
        self._records: dict[str, CorpusRecord] = {}
        self._order: list[str] = []
        self.applied = 0
        self._load()

    def _load(self) -> None:
        for rec in read_manifest(self.manifest_path):
            if rec.id not in self._records:
                self._records[rec.id] = rec
                self._order.append(rec.id)
        replayed = self._replay_journal()
        if replayed:
            # Fold the journal into the manifest once per load; decisions
            # applied twice are no-ops, so a crash between the rewrite and
            # the truncate is harmless.
            write_manifest(self.manifest_path, self.records())
            self.journal.write_text("", encoding="utf-8")
            log.info("merged %d journaled decisions into %s", replayed, self.manifest_path)

    def _replay_journal(self) -> int:
        if not self.journal.is_file():
            return 0
        replayed = 0
        for line in self.journal.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                decision = ReviewDecision.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, ValueError):
                # A torn final line from a crash mid-write is expected;
                # anything before it was acknowledged and parses.
                log.warning("skipping malformed journal line in %s", self.journal)
                continue
            try:
                self._apply(decision)
                replayed += 1
            except BokitError:
                # Replay of an already-applied decision.
                continue
        return replayed

    def records(self) -> list[CorpusRecord]:
        return [self._records[rid] for rid in self._order]

    def queue_ids(self) -> list[str]:
        return sorted(
            rid for rid, rec in self._records.items()
            if rec.status is Status.NEEDS_REVIEW
        )

    def queue_page(self, offset: int, limit: int) -> tuple[list[dict], int]:
        ids = self.queue_ids()
        page = ids[max(0, offset):max(0, offset) + max(0, limit)]
        items = [self.record_view(rid) for rid in page]
        return items, len(ids)

    def record_view(self, record_id: str) -> dict:
        rec = self._get(record_id)
        view = rec.to_dict()
        return {k: view[k] for k in QUEUE_FIELDS}

    def _get(self, record_id: str) -> CorpusRecord:
        try:
            return self._records[record_id]
        except KeyError:
            raise UnknownIdError(f"no record with id {record_id!r}") from None

    def audio_file(self, record_id: str) -> Path:
        rec = self._get(record_id)
        path = Path(rec.audio_path)
        if rec.status is Status.REJECTED or not path.is_file():
            raise UnknownIdError(f"record {record_id!r} has no reviewable audio")
        return path

    def _apply(self, decision: ReviewDecision) -> CorpusRecord:
        """Mutate in-memory state; validation only, no persistence."""
        rec = self._get(decision.record_id)
        if rec.status is not Status.NEEDS_REVIEW:
            if rec.review is not None and (
                rec.review.action == decision.action
                and rec.review.edited_text == decision.edited_text
            ):
                return rec  # idempotent repeat
            raise NotReviewableError(
                f"record {decision.record_id!r} is {rec.status.value}, not reviewable"
            )
        if decision.action is ReviewAction.ACCEPT:
            updated = rec.with_review(decision, status=Status.ACCEPTED)
        elif decision.action is ReviewAction.REJECT:
            updated = rec.with_review(
                decision,
                status=Status.REJECTED,
                reject_reason=RejectReason.REVIEWER_REJECTED,
            )
        else:
            text = (decision.edited_text or "").strip()
            if not text:
                raise InvalidEditError("edited text must be non-empty")
            norm = normalize_text(text, self.normalization)
            updated = rec.with_review(
                decision,
                status=Status.ACCEPTED,
                text_raw=text,
                text_normalized=norm.normalized,
                syllable_count=count_syllables(norm.normalized),
            )
        self._records[rec.id] = updated
        return updated

    def post_decision(self, decision: ReviewDecision) -> CorpusRecord:
        """Validate, persist durably, then apply. Serialized writer."""
        with self._lock:
            before = self._get(decision.record_id)
            updated = self._apply(decision)
            if updated is before and before.status is not Status.NEEDS_REVIEW:
                return updated  # no-op repeat, nothing to persist
            with open(self.journal, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(decision.to_dict(), ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self.applied += 1
            return updated


def _decision_from_request(body: dict) -> ReviewDecision:
    try:
        action = ReviewAction(body["action"])
    except (KeyError, ValueError):
        raise InvalidEditError(
            f"action must be one of {[a.value for a in ReviewAction]}"
        ) from None
    if "record_id" not in body:
        raise InvalidEditError("decision needs a record_id")
    if action is ReviewAction.EDIT_TEXT and not (body.get("edited_text") or "").strip():
        raise InvalidEditError("edit_text decisions need non-empty edited_text")
    return ReviewDecision(
        record_id=body["record_id"],
        action=action,
        reviewer=body.get("reviewer", "anonymous"),
        timestamp=body.get("timestamp") or datetime.now(timezone.utc).isoformat(),
        edited_text=body.get("edited_text"),
    )


_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>bokit review</title></head>
<body><h1>bokit review server</h1>
<p>No review UI assets were provided (--static-dir). The JSON API is up:</p>
<ul><li>GET /queue?offset=0&amp;limit=10</li><li>GET /records/{id}</li>
<li>GET /audio/{id}</li><li>POST /decisions</li></ul></body></html>
"""

_ERROR_STATUS = {
    "unknown_id": 404,
    "not_reviewable": 409,
    "invalid_edit": 400,
}


class ReviewHandler(BaseHTTPRequestHandler):
    session: ReviewSession
    static_dir: Path | None = None

    def log_message(self, fmt, *args):
        log.debug("%s - %s", self.address_string(), fmt % args)

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, exc: BokitError, record_id: str | None = None) -> None:
        payload = {"category": exc.category, "message": str(exc)}
        if record_id:
            payload["id"] = record_id
        self._send_json(_ERROR_STATUS.get(exc.category, 400), payload)

    def do_GET(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if url.path == "/queue":
                q = parse_qs(url.query)
                offset = int(q.get("offset", ["0"])[0])
                limit = int(q.get("limit", ["20"])[0])
                items, total = self.session.queue_page(offset, limit)
                self._send_json(200, {"items": items, "total": total,
                                      "offset": offset, "limit": limit})
            elif len(parts) == 2 and parts[0] == "records":
                self._send_json(200, self.session.record_view(parts[1]))
            elif len(parts) == 2 and parts[0] == "audio":
                path = self.session.audio_file(parts[1])
                data = path.read_bytes()
                self.send_response(200)
                self.send_header("Content-Type", "audio/wav")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)
            else:
                self._serve_static(url.path)
        except BokitError as exc:
            self._send_error_json(exc, parts[1] if len(parts) == 2 else None)
        except (ValueError, OSError) as exc:
            self._send_json(400, {"category": "bad_request", "message": str(exc)})

    def _serve_static(self, path: str) -> None:
        if self.static_dir is None:
            body = _FALLBACK_PAGE.encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "text/html; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        rel = path.lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            self._send_json(404, {"category": "not_found", "message": f"no asset {path}"})
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_POST(self):
        url = urlparse(self.path)
        if url.path != "/decisions":
            self._send_json(404, {"category": "not_found", "message": url.path})
            return
        record_id = None
        try:
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length) or b"{}")
            record_id = body.get("record_id")
            decision = _decision_from_request(body)
            updated = self.session.post_decision(decision)
            self._send_json(200, {
                "id": updated.id,
                "status": updated.status.value,
                "applied": self.session.applied,
            })
        except BokitError as exc:
            self._send_error_json(exc, record_id=record_id)
        except json.JSONDecodeError as exc:
            self._send_json(400, {"category": "bad_request", "message": str(exc)})


def make_server(
    session: ReviewSession,
    host: str = "127.0.0.1",
    port: int = 0,
    static_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    handler = type("BoundReviewHandler", (ReviewHandler,), {
        "session": session,
        "static_dir": Path(static_dir) if static_dir else None,
    })
    return ThreadingHTTPServer((host, port), handler)


def serve(
    manifest_path: str | Path,
    host: str = "127.0.0.1",
    port: int = 8377,
    static_dir: str | Path | None = None,
    normalization: NormalizationConfig | None = None,
) -> None:
    """Run the review server until interrupted."""
    session = ReviewSession(manifest_path, normalization)
    server = make_server(session, host, port, static_dir)
    actual_port = server.server_address[1]
    print(f"review server listening on http://{host}:{actual_port}", flush=True)
    log.info("queue holds %d records", len(session.queue_ids()))
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
