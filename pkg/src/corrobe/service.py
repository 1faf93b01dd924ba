"""HTTP API consumed by the dashboard.

Every GET is a pure read over results the CLI stages cached earlier; request
handlers only slice and aggregate. The one write endpoint is
POST /selection/export, which delegates to the pattern-discovery exporter.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .corruption.specs import CLEAN_KEY, KINDS, SEVERITIES
from .errors import CorrobeError, InputError, StageError
from .pipeline import (
    Session,
    curve_for_kind,
    export_from_cache,
    instance_detail,
    load_patterns,
    load_tasks,
)
from .sg import TaskCategory


class ExportRequest(BaseModel):
    ids: list[str]
    key: str
    task: str


def _task_or_400(value: str) -> TaskCategory:
    try:
        return TaskCategory(value)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"unknown task {value!r}") from None


def create_app(data_dir: Path, dashboard_dist: Path | None = None) -> FastAPI:
    session = Session.load(Path(data_dir))
    app = FastAPI(title="corrobe", version="0.1.0")

    display_path = session.root / "display_fixture.json"
    display_fixture = json.loads(display_path.read_text()) if display_path.exists() else None

    @app.exception_handler(CorrobeError)
    async def _corrobe_error(request, exc: CorrobeError):
        status = 404 if isinstance(exc, InputError) else 409
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.get("/corruptions")
    def corruptions() -> dict:
        available = set(session.manifest.caption_keys())
        entries = [
            {
                "key": CLEAN_KEY,
                "kind": None,
                "severity": 0,
                "available": CLEAN_KEY in available,
            }
        ]
        for kind in KINDS:
            for severity in range(1, 6):
                key = f"{kind}_{severity}"
                entries.append(
                    {"key": key, "kind": kind, "severity": severity, "available": key in available}
                )
        return {
            "kinds": list(KINDS),
            "severities": list(SEVERITIES),
            "entries": entries,
        }

    @app.get("/curves")
    def curves(kind: str = Query(...)) -> dict:
        if kind not in KINDS:
            raise HTTPException(status_code=404, detail=f"unknown corruption kind {kind!r}")
        try:
            payload = curve_for_kind(session, kind)
        except StageError as e:
            return {"kind": kind, "status": "not_computed", "detail": str(e)}
        payload["status"] = "ok"
        if display_fixture and kind in display_fixture.get("curves", {}):
            payload["display_reference"] = {
                "reproducible": False,
                **display_fixture["curves"][kind],
            }
        return payload

    @app.get("/tasks")
    def tasks(key: str = Query(...)) -> dict:
        try:
            _, corrupted = load_tasks(session, key)
            _, clean = load_tasks(session, CLEAN_KEY)
        except StageError as e:
            return {"key": key, "status": "not_computed", "detail": str(e)}
        clean_by_task = {s["task"]: s for s in clean}
        out = []
        for s in corrupted:
            out.append(
                {
                    "task": s["task"],
                    "corrupted": {k: s[k] for k in ("attempt_count", "error_rate", "shift_rate", "sensitivity")},
                    "clean": {
                        k: clean_by_task[s["task"]][k]
                        for k in ("attempt_count", "error_rate", "shift_rate", "sensitivity")
                    },
                    "densities": s["densities"],
                }
            )
        return {"key": key, "status": "ok", "tasks": out}

    @app.get("/projection")
    def projection(key: str = Query(...), task: str = Query(...)) -> dict:
        t = _task_or_400(task)
        try:
            meta, points, clusters = load_patterns(session, key, t)
        except StageError as e:
            return {"key": key, "task": task, "status": "not_computed", "detail": str(e)}
        if not points:
            return {"key": key, "task": task, "status": "empty", "points": [], "clusters": []}
        return {
            "key": key,
            "task": task,
            "status": "ok",
            "alpha": meta["alpha"],
            "points": points,
            "clusters": clusters,
        }

    @app.get("/instance")
    def instance(id: str = Query(...), key: str = Query(...)) -> dict:
        detail = instance_detail(session, id, key)
        detail["image"]["clean"] = _served_path(session.root, detail["image"]["clean"])
        detail["image"]["corrupted"] = _served_path(session.root, detail["image"]["corrupted"])
        return detail

    @app.post("/selection/export")
    def selection_export(req: ExportRequest) -> dict:
        t = _task_or_400(req.task)
        try:
            path, header = export_from_cache(session, req.ids, req.key, t)
        except InputError as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        return {"path": str(path), "count": header["count"], "header": header}

    app.mount("/files", StaticFiles(directory=str(session.root)), name="files")
    if dashboard_dist and Path(dashboard_dist).exists():
        app.mount("/", StaticFiles(directory=str(dashboard_dist), html=True), name="dashboard")
    return app


def _served_path(root: Path, raw: str) -> str:
    """Rewrite an artifact path to its /files URL when it lives in the session dir."""
    p = Path(raw)
    try:
        rel = p.resolve().relative_to(Path(root).resolve()) if p.is_absolute() else Path(raw)
        return f"/files/{rel.as_posix()}"
    except ValueError:
        return raw
