"""REST service exposing joke sessions with editable stages.

Sessions are event-sourced: every accepted mutation appends one line to a
per-session .jsonl file, and replaying that file reproduces the state
exactly (the crash-recovery story and the audit trail are the same
mechanism). Mutations within a session are serialized by a per-session
lock; different sessions proceed in parallel.
"""
from __future__ import annotations

import hashlib
import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from .backend import BackendError, PromptCatalog, load_catalog
from .model import (
    PipelineState,
    PunchLinePositionViolated,
    STAGE_FIELDS,
    Stage,
    StageOrderViolation,
    advance_stage,
    payload_from_jsonable,
    payload_to_jsonable,
    state_to_dict,
)
from .pipeline import (
    EmptyTopic,
    InvalidPayload,
    PipelineConfig,
    PipelineError,
    advance_one,
    edit_stage,
    set_topic,
)


class NotFound(Exception):
    pass


@dataclass(frozen=True)
class EventEntry:
    ts: str
    kind: str
    stage: str
    digest: str


@dataclass
class SessionRecord:
    session_id: str
    created_at: str
    state: PipelineState
    event_log: list[EventEntry] = field(default_factory=list)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _digest(payload: Any) -> str:
    canonical = json.dumps(payload, ensure_ascii=False, separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def _apply_event(state: Optional[PipelineState], event: dict) -> PipelineState:
    kind = event["kind"]
    payload = event["payload"]
    if kind == "create":
        return set_topic(payload["topic"])
    if state is None:
        raise ValueError(f"event {kind!r} before create")
    stage = Stage(payload["stage"])
    data = payload_from_jsonable(stage, payload["data"])
    if kind == "advance":
        return advance_stage(state, stage, data)
    if kind == "edit":
        return edit_stage(state, stage, data)
    raise ValueError(f"unknown event kind {kind!r}")


def _event_stage(event: dict) -> str:
    payload = event["payload"]
    return payload["stage"] if "stage" in payload else Stage.TopicSet.value


class SessionStore:
    """Disk-backed session registry; one append-only event file per session."""

    def __init__(self, state_dir: str | Path) -> None:
        self.state_dir = Path(state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self._records: dict[str, SessionRecord] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.state_dir / f"{session_id}.jsonl"

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def _append(self, record: SessionRecord, kind: str, payload: Any) -> None:
        event = {"ts": _now(), "kind": kind, "payload": payload}
        with open(self._path(record.session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")
        record.event_log.append(EventEntry(
            ts=event["ts"], kind=kind, stage=_event_stage(event), digest=_digest(payload),
        ))

    def create(self, topic_text: str) -> SessionRecord:
        state = set_topic(topic_text)
        record = SessionRecord(
            session_id=uuid.uuid4().hex, created_at=_now(), state=state,
        )
        with self._registry_lock:
            self._records[record.session_id] = record
        with self.lock(record.session_id):
            self._append(record, "create", {"topic": state.topic.text})
        # replay derives created_at from the first event, so they must agree
        record.created_at = record.event_log[0].ts
        return record

    def get(self, session_id: str) -> SessionRecord:
        with self._registry_lock:
            record = self._records.get(session_id)
        if record is not None:
            return record
        record = self._load(session_id)
        with self._registry_lock:
            self._records.setdefault(session_id, record)
            return self._records[session_id]

    def _load(self, session_id: str) -> SessionRecord:
        path = self._path(session_id)
        if not path.exists():
            raise NotFound(f"no session {session_id!r}")
        state: Optional[PipelineState] = None
        created_at = None
        log: list[EventEntry] = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                state = _apply_event(state, event)
                if created_at is None:
                    created_at = event["ts"]
                log.append(EventEntry(
                    ts=event["ts"], kind=event["kind"],
                    stage=_event_stage(event), digest=_digest(event["payload"]),
                ))
        if state is None or created_at is None:
            raise NotFound(f"session {session_id!r} has an empty event log")
        return SessionRecord(
            session_id=session_id, created_at=created_at, state=state, event_log=log,
        )

    def record_advance(self, record: SessionRecord, new_state: PipelineState) -> None:
        stage = new_state.stage
        data = payload_to_jsonable(stage, getattr(new_state, STAGE_FIELDS[stage]))
        self._append(record, "advance", {"stage": stage.value, "data": data})
        record.state = new_state

    def record_edit(self, record: SessionRecord, stage: Stage, new_state: PipelineState) -> None:
        data = payload_to_jsonable(stage, getattr(new_state, STAGE_FIELDS[stage]))
        self._append(record, "edit", {"stage": stage.value, "data": data})
        record.state = new_state


# --- error mapping -----------------------------------------------------------

_VALIDATION_KINDS = ("EmptyTopic", "InvalidPayload", "HandleNotInTopic", "InvalidStage")


def _error_response(kind: str, stage: Optional[str], message: str, status: int) -> Response:
    body = {"error": {"kind": kind, "stage": stage, "message": message}}
    return _json_response(body, status)


def _json_response(body: Any, status: int = 200) -> Response:
    return Response(
        content=json.dumps(body, ensure_ascii=False, separators=(",", ":")),
        status_code=status,
        media_type="application/json",
    )


def _map_error(exc: Exception, editing: bool = False) -> Response:
    stage = getattr(exc, "stage", None)
    kind = type(exc).__name__
    message = str(exc)
    if isinstance(exc, NotFound):
        return _error_response("NotFound", None, message, 404)
    if isinstance(exc, StageOrderViolation):
        return _error_response(kind, stage, message, 409)
    if isinstance(exc, (EmptyTopic, InvalidPayload)):
        return _error_response(kind, stage, message, 422)
    if isinstance(exc, (ValueError, PunchLinePositionViolated)) and editing:
        return _error_response("InvalidPayload", stage, message, 422)
    if isinstance(exc, PipelineError) and editing and kind in _VALIDATION_KINDS:
        return _error_response(kind, stage, message, 422)
    if isinstance(exc, (PipelineError, BackendError)):
        return _error_response(kind, stage, message, 502)
    raise exc


def _session_body(record: SessionRecord) -> dict:
    return {
        "session_id": record.session_id,
        "created_at": record.created_at,
        "state": state_to_dict(record.state),
    }


def create_app(
    backend,
    state_dir: str | Path,
    config: Optional[PipelineConfig] = None,
    catalog: Optional[PromptCatalog] = None,
) -> FastAPI:
    store = SessionStore(state_dir)
    config = config or PipelineConfig()
    catalog = catalog or load_catalog()
    app = FastAPI(title="witforge", docs_url=None, redoc_url=None)
    # the browser editor is served from its own origin; no credentials involved
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    app.state.store = store

    def _body(request_json: Any) -> dict:
        if not isinstance(request_json, dict):
            raise InvalidPayload("the request body must be a JSON object")
        return request_json

    @app.post("/v1/sessions")
    async def create_session(request: Request) -> Response:
        try:
            data = _body(await request.json())
            topic = data.get("topic", "")
            record = store.create(str(topic))
        except json.JSONDecodeError:
            return _error_response("InvalidPayload", None, "request body is not JSON", 422)
        except Exception as exc:
            return _map_error(exc, editing=True)
        return _json_response(_session_body(record), 201)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str) -> Response:
        try:
            record = store.get(session_id)
        except Exception as exc:
            return _map_error(exc)
        return _json_response(_session_body(record))

    @app.get("/v1/sessions/{session_id}/history")
    def get_history(session_id: str) -> Response:
        try:
            record = store.get(session_id)
        except Exception as exc:
            return _map_error(exc)
        events = [
            {"ts": e.ts, "kind": e.kind, "stage": e.stage, "digest": e.digest}
            for e in record.event_log
        ]
        return _json_response({"session_id": record.session_id, "events": events})

    @app.post("/v1/sessions/{session_id}/advance")
    def advance_session(session_id: str) -> Response:
        try:
            record = store.get(session_id)
            with store.lock(session_id):
                new_state = advance_one(record.state, backend, config, catalog)
                store.record_advance(record, new_state)
        except Exception as exc:
            return _map_error(exc)
        return _json_response(_session_body(record))

    @app.post("/v1/sessions/{session_id}/run")
    def run_session(session_id: str) -> Response:
        try:
            record = store.get(session_id)
            with store.lock(session_id):
                while record.state.stage is not Stage.Selected:
                    new_state = advance_one(record.state, backend, config, catalog)
                    store.record_advance(record, new_state)
        except Exception as exc:
            return _map_error(exc)
        return _json_response(_session_body(record))

    @app.patch("/v1/sessions/{session_id}/stages/{stage}")
    async def edit_session_stage(session_id: str, stage: str, request: Request) -> Response:
        try:
            try:
                target = Stage(stage)
            except ValueError:
                err = InvalidPayload(f"unknown stage {stage!r}")
                err.stage = stage
                raise err from None
            data = _body(await request.json())
            if "payload" not in data:
                raise InvalidPayload("the request body needs a 'payload' field")
            record = store.get(session_id)
            with store.lock(session_id):
                payload = payload_from_jsonable(target, data["payload"])
                new_state = edit_stage(record.state, target, payload)
                store.record_edit(record, target, new_state)
        except json.JSONDecodeError:
            return _error_response("InvalidPayload", stage, "request body is not JSON", 422)
        except Exception as exc:
            return _map_error(exc, editing=True)
        return _json_response(_session_body(record))

    @app.get("/v1/health")
    def health() -> Response:
        return _json_response({"status": "ok", "backend": type(backend).__name__})

    return app
