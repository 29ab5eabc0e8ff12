"""HTTP surface of the annotation loop."""

from __future__ import annotations

import io
import re
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, Response
from PIL import Image
from pydantic import BaseModel, Field

from ..analysis.annotations import load_records
from ..analysis.tally import tally
from .runs import RunDirectory
from .sessions import (
    EmptySubmissionError,
    SessionManager,
    TaskConflictError,
    UnknownSessionError,
    UnknownTaskError,
)

_OVERLAY_NAME = re.compile(r"^(?P<method>[a-z_]+)_(?P<sign>positive|negative)_overlay\.png$")


class SessionRequest(BaseModel):
    annotator_id: str = Field(min_length=1)
    run_id: str | None = None
    method: str = "gradcam"


class SubmitRequest(BaseModel):
    labels: list[str] = Field(default_factory=list)
    empty: bool = False


def create_app(run: RunDirectory) -> FastAPI:
    app = FastAPI(title="perceptlab annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    manager = SessionManager(run.store_path, run.model_ref)
    app.state.run = run
    app.state.manager = manager

    @app.post("/sessions")
    def create_session(request: SessionRequest):
        try:
            session = manager.create_session(
                run.extremes, run.saliency_dir, request.annotator_id, method=request.method
            )
        except FileNotFoundError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return session.to_json()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = _session_or_404(manager, session_id)
        return session.to_json()

    @app.get("/sessions/{session_id}/next")
    def next_task(session_id: str):
        session = _session_or_404(manager, session_id)
        task = session.next_pending()
        progress = {"done": session.done_count, "total": len(session.tasks)}
        if task is None:
            return {"done": True, "progress": progress}
        return {"done": False, "progress": progress, **task.to_json()}

    @app.post("/sessions/{session_id}/tasks/{task_id}")
    def submit(session_id: str, task_id: str, request: SubmitRequest):
        try:
            record = manager.submit(session_id, task_id, request.labels, empty=request.empty)
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except UnknownTaskError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except TaskConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except EmptySubmissionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return record.to_json()

    @app.get("/tally")
    def get_tally(attribute: str | None = None, polarity: str | None = None, model: str | None = None):
        tables = tally(load_records(run.store_path))
        selected = [
            table.to_json()
            for (attr, pol, mod), table in sorted(tables.items())
            if (attribute is None or attr == attribute)
            and (polarity is None or pol == polarity)
            and (model is None or mod == model)
        ]
        return {"tables": selected}

    @app.get("/media/{image_id}/original.png")
    def original_image(image_id: str):
        record = run.find_image(image_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown image {image_id!r}")
        if record.file_path.suffix.lower() == ".png":
            return FileResponse(record.file_path, media_type="image/png")
        with Image.open(record.file_path) as img:
            buffer = io.BytesIO()
            img.convert("RGB").save(buffer, format="PNG")
        return Response(content=buffer.getvalue(), media_type="image/png")

    @app.get("/media/{image_id}/{overlay_name}")
    def overlay_image(image_id: str, overlay_name: str):
        if not _OVERLAY_NAME.match(overlay_name):
            raise HTTPException(status_code=404, detail=f"not an overlay resource: {overlay_name!r}")
        path: Path = run.saliency_dir / f"{image_id}_{overlay_name}"
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"no overlay {overlay_name!r} for image {image_id!r}")
        return FileResponse(path, media_type="image/png")

    return app


def _session_or_404(manager: SessionManager, session_id: str):
    try:
        return manager.get_session(session_id)
    except UnknownSessionError as exc:
        raise HTTPException(status_code=404, detail=str(exc))
