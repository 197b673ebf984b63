"""Session-oriented HTTP API for interactive elicitation.

Each session holds a performance table plus an editable judgment list; every
edit bumps the session revision and invalidates cached reports.  Solves run
on a per-session background worker (one at a time, queued otherwise);
enumeration jobs expose the sets found so far through the status endpoint so
a client can stream progress.  Identical (revision, mode, params) requests
are answered from a byte-identical cached report.

Endpoints:
    POST   /sessions
    PUT    /sessions/{sid}/table            body: {"csv": "..."} or raw CSV
    PUT    /sessions/{sid}/statements       body: {"lines": [...]} or raw text
    POST   /sessions/{sid}/statements       body: {"line": "a > b"}
    DELETE /sessions/{sid}/statements/{k}
    POST   /sessions/{sid}/solve            body: mode + params (+ ?wait=1)
    GET    /sessions/{sid}/solve/{job}/status
    GET    /sessions/{sid}/report/{job}
    GET    /sessions/{sid}/consistency      quick probe for UI badges
"""

from __future__ import annotations

import io
import json
import os
import queue
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, Request, Response
from pydantic import BaseModel

from .analysis import DomainError
from .disaggregation import DEFAULT_EPSILON, InconsistencyError, check_consistency
from .io_cli import (MODES, ProjectConfig, dump_performance_csv,
                     dump_preferences, load_performance_csv, load_preferences,
                     run)
from .milp import ResourceLimitError
from .model import PerformanceTable, PreferenceStatement
from ._simplex import NumericalError


class SolveRequest(BaseModel):
    mode: str
    gamma: int = 5
    p: float = 0.0
    C: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    max_selected: Optional[int] = None


class LineBody(BaseModel):
    line: str


@dataclass
class Job:
    id: str
    revision: int
    mode: str
    params_key: str
    status: str = "queued"  # queued | running | done | error
    error: str | None = None
    error_status: int = 500
    sets_found: list[list[str]] = field(default_factory=list)
    report_bytes: bytes | None = None
    done_event: threading.Event = field(default_factory=threading.Event)


@dataclass
class Session:
    id: str
    revision: int = 0
    table: PerformanceTable | None = None
    statements: list[PreferenceStatement] = field(default_factory=list)
    jobs: dict[str, Job] = field(default_factory=dict)
    cache: dict[tuple[int, str, str], str] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    work: "queue.Queue[str]" = field(default_factory=queue.Queue)
    worker: threading.Thread | None = None
    job_counter: int = 0


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self) -> Session:
        sid = uuid.uuid4().hex[:12]
        session = Session(id=sid)
        with self._lock:
            self._sessions[sid] = session
        return session

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise HTTPException(404, detail={"code": "unknown-session", "id": sid})
        return session

    def snapshot(self) -> dict:
        with self._lock:
            sessions = list(self._sessions.values())
        body = {}
        for s in sessions:
            with s.lock:
                body[s.id] = {
                    "revision": s.revision,
                    "table": dump_performance_csv(s.table) if s.table else None,
                    "statements": dump_preferences(s.statements),
                }
        return body

    def restore(self, body: dict) -> None:
        for sid, entry in body.items():
            session = Session(id=sid, revision=int(entry.get("revision", 0)))
            if entry.get("table"):
                session.table = load_performance_csv(io.StringIO(entry["table"]))
            if entry.get("statements"):
                known = set(session.table.alternatives) if session.table else None
                session.statements = list(
                    load_preferences(io.StringIO(entry["statements"]), known))
            with self._lock:
                self._sessions[sid] = session


def _params_key(req: SolveRequest) -> str:
    return json.dumps(req.model_dump(), sort_keys=True)


def _ensure_worker(session: Session) -> None:
    if session.worker is None or not session.worker.is_alive():
        session.worker = threading.Thread(
            target=_worker_loop, args=(session,), daemon=True,
            name=f"prefsel-worker-{session.id}")
        session.worker.start()


def _worker_loop(session: Session) -> None:
    while True:
        job_id = session.work.get()
        if job_id is None:
            return
        with session.lock:
            job = session.jobs[job_id]
            job.status = "running"
            table = session.table
            statements = tuple(session.statements)
        _run_job(job, table, statements)


def _run_job(job: Job, table: PerformanceTable,
             statements: tuple[PreferenceStatement, ...]) -> None:
    req = SolveRequest(**json.loads(job.params_key))
    budget = None
    if os.environ.get("PREFSEL_NODE_BUDGET"):
        budget = int(os.environ["PREFSEL_NODE_BUDGET"])

    def on_set(found):
        job.sets_found.append(sorted(found))

    try:
        config = ProjectConfig(mode=req.mode, gamma=req.gamma, p=req.p, C=req.C,
                               epsilon=req.epsilon,
                               max_selected=req.max_selected)
        report = run(config, table, statements, node_budget=budget,
                     on_set=on_set)
        body = json.loads(report.to_json())
        body["revision"] = job.revision
        body["job"] = job.id
        job.report_bytes = json.dumps(body, sort_keys=True).encode()
        job.status = "done"
    except InconsistencyError as exc:
        job.status, job.error, job.error_status = "error", str(exc), 409
    except DomainError as exc:
        job.status, job.error, job.error_status = "error", str(exc), 422
    except (ResourceLimitError, NumericalError) as exc:
        job.status, job.error, job.error_status = "error", str(exc), 503
    except Exception as exc:  # pragma: no cover - defensive
        job.status, job.error, job.error_status = "error", repr(exc), 500
    finally:
        job.done_event.set()


def create_app() -> FastAPI:
    store = SessionStore()
    snapshot_path = os.environ.get("PREFSEL_SESSION_SNAPSHOT")

    @asynccontextmanager
    async def lifespan(_app):
        if snapshot_path and os.path.exists(snapshot_path):
            store.restore(json.loads(open(snapshot_path).read()))
        yield
        if snapshot_path:  # pragma: no cover - exercised at process exit
            with open(snapshot_path, "w") as fh:
                json.dump(store.snapshot(), fh)

    app = FastAPI(title="prefsel service", version="0.1.0", lifespan=lifespan)
    app.state.store = store

    async def _text_body(request: Request, key: str) -> str:
        raw = await request.body()
        ctype = request.headers.get("content-type", "")
        if "json" in ctype:
            try:
                payload = json.loads(raw)
            except json.JSONDecodeError:
                raise HTTPException(422, detail={"code": "bad-json"})
            if key == "lines" and isinstance(payload.get(key), list):
                return "\n".join(payload[key])
            if not isinstance(payload.get(key), str):
                raise HTTPException(422, detail={"code": f"missing-{key}"})
            return payload[key]
        return raw.decode()

    @app.post("/sessions", status_code=201)
    def create_session():
        session = store.create()
        return {"id": session.id, "revision": session.revision}

    @app.put("/sessions/{sid}/table")
    async def put_table(sid: str, request: Request):
        session = store.get(sid)
        text = await _text_body(request, "csv")
        try:
            table = load_performance_csv(io.StringIO(text))
        except DomainError as exc:
            raise HTTPException(422, detail={"code": "bad-table", "error": str(exc)})
        with session.lock:
            known = set(table.alternatives)
            for st in session.statements:
                if st.better not in known or st.other not in known:
                    raise HTTPException(422, detail={
                        "code": "statement-orphaned",
                        "error": f"existing judgment {st} references an "
                                 f"alternative missing from the new table"})
            session.table = table
            session.revision += 1
            return {"revision": session.revision,
                    "alternatives": len(table.alternatives),
                    "criteria": len(table.criteria)}

    @app.put("/sessions/{sid}/statements")
    async def put_statements(sid: str, request: Request):
        session = store.get(sid)
        text = await _text_body(request, "lines")
        with session.lock:
            known = set(session.table.alternatives) if session.table else None
            try:
                statements = load_preferences(io.StringIO(text), known)
            except DomainError as exc:
                raise HTTPException(422, detail={"code": "bad-statement",
                                                 "error": str(exc)})
            session.statements = list(statements)
            session.revision += 1
            return {"revision": session.revision, "count": len(statements)}

    @app.post("/sessions/{sid}/statements")
    def add_statement(sid: str, body: LineBody):
        session = store.get(sid)
        with session.lock:
            known = set(session.table.alternatives) if session.table else None
            try:
                st = load_preferences(io.StringIO(body.line), known)
            except DomainError as exc:
                raise HTTPException(422, detail={"code": "bad-statement",
                                                 "error": str(exc)})
            session.statements.extend(st)
            session.revision += 1
            return {"revision": session.revision,
                    "count": len(session.statements)}

    @app.delete("/sessions/{sid}/statements/{k}")
    def remove_statement(sid: str, k: int):
        session = store.get(sid)
        with session.lock:
            if k < 0 or k >= len(session.statements):
                raise HTTPException(404, detail={"code": "unknown-statement",
                                                 "index": k})
            session.statements.pop(k)
            session.revision += 1
            return {"revision": session.revision,
                    "count": len(session.statements)}

    @app.get("/sessions/{sid}/consistency")
    def consistency(sid: str):
        session = store.get(sid)
        with session.lock:
            if session.table is None:
                raise HTTPException(409, detail={"code": "no-table"})
            table, statements = session.table, tuple(session.statements)
            revision = session.revision
        probe = check_consistency(table, statements)
        return {"revision": revision, "consistent": probe.consistent,
                "f_star": probe.f_star if probe.f_star != float("inf") else None}

    @app.post("/sessions/{sid}/solve")
    def solve(sid: str, req: SolveRequest, wait: bool = False):
        session = store.get(sid)
        if req.mode not in MODES:
            raise HTTPException(422, detail={"code": "unknown-mode",
                                             "mode": req.mode})
        if req.epsilon <= 0 or req.gamma < 1 or req.p < 0 or req.C < 0:
            raise HTTPException(422, detail={"code": "bad-params"})
        with session.lock:
            if session.table is None:
                raise HTTPException(409, detail={"code": "no-table"})
            if req.mode != "consistency" and not session.statements:
                raise HTTPException(409, detail={"code": "no-statements"})
            key = (session.revision, req.mode, _params_key(req))
            cached = session.cache.get(key)
            if cached is not None:
                return {"job": cached, "status": session.jobs[cached].status,
                        "revision": session.revision, "cached": True}
            session.job_counter += 1
            job = Job(id=f"j{session.job_counter}", revision=session.revision,
                      mode=req.mode, params_key=_params_key(req))
            session.jobs[job.id] = job
            session.cache[key] = job.id
            session.work.put(job.id)
            _ensure_worker(session)
        if wait:
            job.done_event.wait(timeout=600)
        return {"job": job.id, "status": job.status,
                "revision": job.revision, "cached": False}

    @app.get("/sessions/{sid}/solve/{job_id}/status")
    def job_status(sid: str, job_id: str):
        session = store.get(sid)
        with session.lock:
            job = session.jobs.get(job_id)
            if job is None:
                raise HTTPException(404, detail={"code": "unknown-job"})
            return {"job": job.id, "status": job.status, "mode": job.mode,
                    "revision": job.revision,
                    "session_revision": session.revision,
                    "stale": job.revision != session.revision,
                    "sets_found": list(job.sets_found),
                    "error": job.error}

    @app.get("/sessions/{sid}/report/{job_id}")
    def job_report(sid: str, job_id: str):
        session = store.get(sid)
        with session.lock:
            job = session.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, detail={"code": "unknown-job"})
        if job.status == "error":
            raise HTTPException(job.error_status,
                                detail={"code": "solve-failed", "error": job.error})
        if job.status != "done":
            raise HTTPException(409, detail={"code": "not-finished",
                                             "status": job.status})
        return Response(content=job.report_bytes, media_type="application/json")

    return app


app = create_app()
