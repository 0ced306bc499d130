"""HTTP facade for the web client: browse models, run sessions, ask for impact.

One model set is loaded at startup and never changes. Sessions live in an
in-memory store under unguessable ids; an optional journal directory gets one
JSON file per session after every mutation, and existing journal files are
loaded back on startup. Reads work on immutable snapshots, writes are
serialized per session, and every error body is ``{"code", "message"}``.
"""

from __future__ import annotations

import secrets
import threading
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .changes import change_from_dict
from .impact import IncompletePath, UnknownSelection, impact_report, session_impact
from .jsonio import canonical_dumps, read_json
from .model import (
    ArchitectureModel,
    ModelError,
    RequirementsModel,
    TraceModel,
    architecture_model_to_dict,
    requirements_model_to_dict,
    trace_model_to_dict,
)
from .propagation import (
    ChangeRejected,
    IllegalAlternative,
    Session,
    SessionError,
    UnknownDecision,
    choose,
    is_complete,
    pending_decisions,
    session_from_dict,
    session_to_dict,
    start_session,
)
from .rules import RuleSet, rules_to_dict


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


class SessionStore:
    """Sessions by id, with per-session write locks and an optional journal."""

    def __init__(self, journal_dir: str | Path | None = None):
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry = threading.Lock()
        self.journal_dir = Path(journal_dir) if journal_dir else None
        if self.journal_dir:
            self.journal_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self.journal_dir.glob("*.json")):
                self._sessions[path.stem] = session_from_dict(read_json(path))
                self._locks[path.stem] = threading.Lock()

    def add(self, session: Session) -> str:
        session_id = secrets.token_urlsafe(16)
        with self._registry:
            self._sessions[session_id] = session
            self._locks[session_id] = threading.Lock()
        self._journal(session_id, session)
        return session_id

    def get(self, session_id: str) -> Session:
        with self._registry:
            session = self._sessions.get(session_id)
        if session is None:
            raise ApiError(404, "UnknownSession", f"no session {session_id}")
        return session

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry:
            lock = self._locks.get(session_id)
        if lock is None:
            raise ApiError(404, "UnknownSession", f"no session {session_id}")
        return lock

    def _journal(self, session_id: str, session: Session) -> None:
        if self.journal_dir:
            path = self.journal_dir / f"{session_id}.json"
            path.write_text(canonical_dumps(session_to_dict(session)), encoding="utf-8", newline="\n")

    def persist(self, session_id: str) -> None:
        with self._registry:
            session = self._sessions[session_id]
        self._journal(session_id, session)

    def ids(self) -> list[str]:
        with self._registry:
            return sorted(self._sessions)


class SessionCreate(BaseModel):
    change: dict[str, Any]


class ChoiceBody(BaseModel):
    decision: str
    pick: str
    justification: str | None = None


class ImpactBody(BaseModel):
    select: str | None = None


def _session_body(session_id: str, session: Session) -> dict[str, Any]:
    body = session_to_dict(session)
    body["id"] = session_id
    body["complete"] = is_complete(session)
    return body


def create_app(
    model: RequirementsModel,
    traces: TraceModel,
    architecture: ArchitectureModel,
    rules: RuleSet,
    journal_dir: str | Path | None = None,
    allow_origins: tuple[str, ...] = (),
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="reqimpact", docs_url=None, redoc_url=None)
    store = SessionStore(journal_dir)
    app.state.store = store

    if allow_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(allow_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    def _api_error(_req: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse({"code": exc.code, "message": exc.message}, status_code=exc.status)

    @app.exception_handler(RequestValidationError)
    def _invalid_body(_req: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse({"code": "InvalidBody", "message": str(exc)}, status_code=422)

    @app.get("/model")
    def get_model() -> dict[str, Any]:
        return requirements_model_to_dict(model)

    @app.get("/architecture")
    def get_architecture() -> dict[str, Any]:
        return architecture_model_to_dict(architecture)

    @app.get("/traces")
    def get_traces() -> dict[str, Any]:
        return trace_model_to_dict(traces)

    @app.get("/rules")
    def get_rules() -> dict[str, Any]:
        return rules_to_dict(rules)

    @app.get("/sessions")
    def list_sessions() -> dict[str, Any]:
        return {"sessions": store.ids()}

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionCreate) -> dict[str, Any]:
        try:
            change = change_from_dict(body.change)
            session = start_session(model, traces, rules, change)
        except (ModelError, ChangeRejected) as exc:
            raise ApiError(422, "ChangeRejected", str(exc)) from exc
        session_id = store.add(session)
        return {
            "id": session_id,
            "complete": is_complete(session),
            "pending": [d.to_dict() for d in pending_decisions(session)],
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict[str, Any]:
        return _session_body(session_id, store.get(session_id))

    @app.post("/sessions/{session_id}/choices")
    def post_choice(session_id: str, body: ChoiceBody) -> dict[str, Any]:
        with store.lock(session_id):
            session = store.get(session_id)
            try:
                choose(session, body.decision, body.pick, body.justification)
            except UnknownDecision as exc:
                raise ApiError(409, "UnknownDecision", str(exc)) from exc
            except IllegalAlternative as exc:
                raise ApiError(409, "IllegalAlternative", str(exc)) from exc
            except SessionError as exc:
                raise ApiError(409, "SessionError", str(exc)) from exc
            store.persist(session_id)
            return _session_body(session_id, session)

    @app.post("/sessions/{session_id}/impact")
    def post_impact(session_id: str, body: ImpactBody) -> dict[str, Any]:
        with store.lock(session_id):
            session = store.get(session_id)
            try:
                result = session_impact(session, body.select)
            except IncompletePath as exc:
                raise ApiError(409, "IncompletePath", str(exc)) from exc
            except UnknownSelection as exc:
                raise ApiError(422, "UnknownSelection", str(exc)) from exc
            return impact_report(result, session)

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
