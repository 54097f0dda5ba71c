"""Annotation service for human evaluation of synthesized tuples.

Serves (document, claim) pairs blind to their stored labels, collects
one verdict per annotator, routes disagreements to an adjudicator, and
reports chance-corrected agreement plus label accuracy. State lives in
an append-only JSONL event log replayed at startup; auth is static
bearer tokens from a config file.

Task state machine: open -> complete -> resolved, with an adjudicating
stop between complete and resolved when verdicts disagree. No transition
skips complete.
"""
from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.staticfiles import StaticFiles

from .core import read_jsonl
from .errors import DataError
from .metrics import fleiss_kappa

OPEN = "open"
COMPLETE = "complete"
ADJUDICATING = "adjudicating"
RESOLVED = "resolved"

_VERDICT_VALUES = {"supported": 1, "unsupported": 0, "1": 1, "0": 0, 1: 1, 0: 0}


def parse_verdict(value) -> int:
    try:
        return _VERDICT_VALUES[value]
    except (KeyError, TypeError):
        raise DataError(
            f"verdict must be supported/unsupported (or 0/1), got {value!r}"
        )


@dataclass
class AnnotationTask:
    id: str
    document: str
    claim: str
    gold: int  # hidden from annotators
    pipeline: str  # hidden from annotators
    verdicts: dict[str, int] = field(default_factory=dict)
    adjudicated: int | None = None
    resolved_verdict: int | None = None
    status: str = OPEN
    history: list[str] = field(default_factory=lambda: [OPEN])

    def transition(self, status: str) -> None:
        self.status = status
        self.history.append(status)


@dataclass(frozen=True)
class Identity:
    name: str
    role: str  # "annotator" | "adjudicator"


class AnnotationStore:
    """Task registry + append-only event log.

    Every mutation appends one event (with a timestamp) and applies it in
    memory under one lock; startup replays the log to rebuild state.
    """

    def __init__(self, log_path: str | Path, annotators: list[str]):
        if len(annotators) < 2:
            raise DataError("need at least two annotators for agreement to mean anything")
        self.log_path = Path(log_path)
        self.annotators = sorted(annotators)
        self.tasks: dict[str, AnnotationTask] = {}
        self._lock = threading.Lock()
        if self.log_path.exists():
            self._replay()

    # -- persistence -------------------------------------------------------

    def _append(self, event: dict) -> None:
        event = dict(event, ts=time.time())
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _replay(self) -> None:
        for i, event in enumerate(read_jsonl(self.log_path), start=1):
            kind = event.get("type")
            try:
                if kind == "task":
                    self._apply_task(event["task"])
                elif kind == "verdict":
                    self._apply_verdict(event["task_id"], event["annotator"],
                                        int(event["verdict"]))
                elif kind == "adjudication":
                    self._apply_adjudication(event["task_id"], int(event["verdict"]))
                else:
                    raise DataError(f"unknown event type {kind!r}")
            except (KeyError, DataError) as exc:
                raise DataError(f"{self.log_path}:{i}: bad event: {exc}")

    # -- event application (no I/O) ----------------------------------------

    def _apply_task(self, obj: dict) -> None:
        task = AnnotationTask(
            id=str(obj["id"]),
            document=str(obj["document"]),
            claim=str(obj["claim"]),
            gold=int(obj["gold"]),
            pipeline=str(obj["pipeline"]),
        )
        self.tasks[task.id] = task

    def _apply_verdict(self, task_id: str, annotator: str, verdict: int) -> None:
        task = self.tasks[task_id]
        task.verdicts[annotator] = verdict
        if len(task.verdicts) == len(self.annotators):
            task.transition(COMPLETE)
            values = set(task.verdicts.values())
            if len(values) == 1:
                task.resolved_verdict = values.pop()
                task.transition(RESOLVED)
            else:
                task.transition(ADJUDICATING)

    def _apply_adjudication(self, task_id: str, verdict: int) -> None:
        task = self.tasks[task_id]
        task.adjudicated = verdict
        task.resolved_verdict = verdict
        task.transition(RESOLVED)

    # -- public API ----------------------------------------------------------

    def load_tasks(self, rows: list[dict]) -> int:
        """Register tasks not already known (e.g. from a prior log)."""
        added = 0
        with self._lock:
            for row in rows:
                for key in ("id", "document", "claim", "gold", "pipeline"):
                    if key not in row:
                        raise DataError(f"task definition missing key {key!r}: {row}")
                if str(row["id"]) in self.tasks:
                    continue
                task_obj = {
                    "id": str(row["id"]),
                    "document": str(row["document"]),
                    "claim": str(row["claim"]),
                    "gold": int(row["gold"]),
                    "pipeline": str(row["pipeline"]),
                }
                self._append({"type": "task", "task": task_obj})
                self._apply_task(task_obj)
                added += 1
        return added

    def get(self, task_id: str) -> AnnotationTask:
        try:
            return self.tasks[task_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no task {task_id!r}")

    def submit(self, task_id: str, annotator: str, verdict: int) -> AnnotationTask:
        with self._lock:
            task = self.get(task_id)
            if annotator not in self.annotators:
                raise HTTPException(
                    status_code=403, detail=f"{annotator!r} is not an assigned annotator"
                )
            previous = task.verdicts.get(annotator)
            if previous is not None:
                if previous == verdict:
                    return task  # idempotent retry of the same submission
                raise HTTPException(
                    status_code=409,
                    detail=f"{annotator} already submitted a different verdict "
                    f"for task {task_id}",
                )
            if task.status != OPEN:
                raise HTTPException(
                    status_code=409,
                    detail=f"task {task_id} is {task.status}, not open",
                )
            self._append(
                {"type": "verdict", "task_id": task_id, "annotator": annotator,
                 "verdict": verdict}
            )
            self._apply_verdict(task_id, annotator, verdict)
            return task

    def adjudicate(self, task_id: str, verdict: int) -> AnnotationTask:
        with self._lock:
            task = self.get(task_id)
            if task.status == RESOLVED:
                raise HTTPException(
                    status_code=409,
                    detail=f"task {task_id} is already resolved"
                    + (" (unanimous; nothing to adjudicate)" if task.adjudicated is None else ""),
                )
            if task.status != ADJUDICATING:
                raise HTTPException(
                    status_code=409,
                    detail=f"task {task_id} is {task.status}; adjudication "
                    "requires a completed task with disagreement",
                )
            self._append({"type": "adjudication", "task_id": task_id, "verdict": verdict})
            self._apply_adjudication(task_id, verdict)
            return task

    def report(self) -> dict:
        """Agreement and accuracy over fully resolved tasks.

        Kappa uses pre-adjudication verdicts only; adjudication must not
        inflate agreement. Accuracy compares each task's stored synthetic
        label with the resolved (consensus) verdict.
        """
        with self._lock:
            open_ids = [t.id for t in self.tasks.values() if t.status != RESOLVED]
            if open_ids:
                raise HTTPException(
                    status_code=409,
                    detail={"error": "unresolved tasks", "open_task_ids": sorted(open_ids)},
                )
            if not self.tasks:
                raise HTTPException(status_code=409, detail={"error": "no tasks loaded"})
            pipelines = sorted({t.pipeline for t in self.tasks.values()})
            out: dict = {
                "n_tasks": len(self.tasks),
                "annotators": self.annotators,
                "pipelines": {},
            }
            for pipeline in pipelines:
                tasks = [t for t in self.tasks.values() if t.pipeline == pipeline]
                ratings = [
                    [t.verdicts[a] for a in self.annotators] for t in tasks
                ]
                label_hits = [
                    int(t.gold == t.resolved_verdict) for t in tasks
                ]
                per_annotator = {
                    a: sum(int(t.verdicts[a] == t.resolved_verdict) for t in tasks)
                    / len(tasks)
                    for a in self.annotators
                }
                out["pipelines"][pipeline] = {
                    "n": len(tasks),
                    "kappa": fleiss_kappa(ratings),
                    "synthetic_label_accuracy": sum(label_hits) / len(tasks),
                    "annotator_accuracy_mean": sum(per_annotator.values())
                    / len(per_annotator),
                    "per_annotator_accuracy": per_annotator,
                    "adjudicated": sum(
                        1 for t in tasks if t.adjudicated is not None
                    ),
                }
            return out


def annotator_task_view(task: AnnotationTask, annotator: str) -> dict:
    """What an annotator may see: never the stored labels, never other
    annotators' verdicts."""
    return {
        "id": task.id,
        "document": task.document,
        "claim": task.claim,
        "my_verdict": task.verdicts.get(annotator),
    }


def adjudicator_task_view(task: AnnotationTask) -> dict:
    """Adjudicators see the disagreeing verdicts, still not the stored
    labels."""
    return {
        "id": task.id,
        "document": task.document,
        "claim": task.claim,
        "status": task.status,
        "verdicts": dict(sorted(task.verdicts.items())),
        "final": task.resolved_verdict,
    }


def load_tokens(path: str | Path) -> dict[str, Identity]:
    """Token config: {"tokens": {"<token>": {"name": ..., "role": ...}}}."""
    if not Path(path).is_file():
        raise DataError(f"no such tokens file: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid token config: {exc}")
    tokens = obj.get("tokens")
    if not isinstance(tokens, dict) or not tokens:
        raise DataError(f"{path}: token config needs a non-empty 'tokens' object")
    out: dict[str, Identity] = {}
    for token, ident in tokens.items():
        role = ident.get("role")
        if role not in ("annotator", "adjudicator"):
            raise DataError(f"{path}: role must be annotator or adjudicator, got {role!r}")
        out[token] = Identity(name=str(ident["name"]), role=role)
    return out


def make_app(store: AnnotationStore, tokens: dict[str, Identity],
             ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="annotation service", docs_url=None, redoc_url=None)

    def identify(request: Request) -> Identity:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        token = header[7:].strip()
        ident = tokens.get(token)
        if ident is None:
            raise HTTPException(status_code=401, detail="unknown token")
        return ident

    @app.get("/tasks")
    def list_tasks(annotator: str | None = None,
                   ident: Identity = Depends(identify)):
        if ident.role == "adjudicator":
            pending = [
                adjudicator_task_view(t)
                for t in store.tasks.values()
                if t.status == ADJUDICATING
            ]
            return {"role": "adjudicator", "tasks": pending,
                    "total": len(store.tasks), "pending": len(pending)}
        if annotator is not None and annotator != ident.name:
            raise HTTPException(
                status_code=403, detail="annotators may only list their own queue"
            )
        views = [annotator_task_view(t, ident.name) for t in store.tasks.values()]
        remaining = sum(1 for v in views if v["my_verdict"] is None)
        return {
            "role": "annotator",
            "annotator": ident.name,
            "tasks": views,
            "total": len(views),
            "remaining": remaining,
            "done": remaining == 0,
        }

    @app.post("/tasks/{task_id}/verdict")
    async def post_verdict(task_id: str, request: Request,
                           ident: Identity = Depends(identify)):
        if ident.role != "annotator":
            raise HTTPException(status_code=403, detail="only annotators submit verdicts")
        body = await request.json()
        try:
            verdict = parse_verdict(body.get("verdict"))
        except DataError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        task = store.submit(task_id, ident.name, verdict)
        return {"ok": True, "task_id": task.id, "my_verdict": verdict}

    @app.post("/tasks/{task_id}/adjudication")
    async def post_adjudication(task_id: str, request: Request,
                                ident: Identity = Depends(identify)):
        if ident.role != "adjudicator":
            raise HTTPException(status_code=403, detail="adjudicator token required")
        body = await request.json()
        try:
            verdict = parse_verdict(body.get("verdict"))
        except DataError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        task = store.adjudicate(task_id, verdict)
        return {"ok": True, "task_id": task.id, "status": task.status,
                "final": task.resolved_verdict}

    @app.get("/report")
    def get_report(ident: Identity = Depends(identify)):
        if ident.role != "adjudicator":
            raise HTTPException(status_code=403, detail="adjudicator token required")
        return store.report()

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
