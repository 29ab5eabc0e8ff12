"""Annotation sessions: task queues over the extreme images of a run."""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..analysis.annotations import AnnotationRecord, append_record, normalize_labels
from ..saliency.overlay import overlay_filename

# Extreme-directed explanation: top images are explained toward +f,
# bottom images toward -f, so heatmaps show what pushes each image
# toward its end of the ranking.
POLARITY_SIGN = {"high": "positive", "low": "negative"}


class UnknownSessionError(KeyError):
    pass


class UnknownTaskError(KeyError):
    pass


class TaskConflictError(ValueError):
    """Submission for a task that is already done."""


class EmptySubmissionError(ValueError):
    """No labels and the no-identifiable-object flag not set."""


@dataclass
class AnnotationTask:
    task_id: str
    image_id: str
    attribute: str
    polarity: str
    method: str
    sign: str
    overlay_url: str
    original_url: str
    status: str = "pending"

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "image_id": self.image_id,
            "attribute": self.attribute,
            "polarity": self.polarity,
            "method": self.method,
            "sign": self.sign,
            "overlay_url": self.overlay_url,
            "original_url": self.original_url,
            "status": self.status,
        }


@dataclass
class Session:
    session_id: str
    annotator_id: str
    tasks: list[AnnotationTask] = field(default_factory=list)

    @property
    def done_count(self) -> int:
        return sum(1 for t in self.tasks if t.status == "done")

    def next_pending(self) -> AnnotationTask | None:
        for task in self.tasks:
            if task.status == "pending":
                return task
        return None

    def to_json(self) -> dict:
        return {
            "session_id": self.session_id,
            "annotator_id": self.annotator_id,
            "total": len(self.tasks),
            "done": self.done_count,
            "tasks": [t.to_json() for t in self.tasks],
        }


class SessionManager:
    """Creates sessions and serializes submissions into the append-only store."""

    def __init__(self, store_path: Path, model_ref: str):
        self.store_path = Path(store_path)
        self.model_ref = model_ref
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create_session(
        self,
        extremes_payloads: list[dict],
        saliency_dir: Path,
        annotator_id: str,
        method: str = "gradcam",
    ) -> Session:
        """One pending task per (image, attribute, polarity), ordered by
        (attribute, polarity, rank). Fails listing images whose overlay is
        missing from ``saliency_dir``."""
        saliency_dir = Path(saliency_dir)
        tasks: list[AnnotationTask] = []
        missing: list[str] = []
        for payload in sorted(extremes_payloads, key=lambda p: p["attribute"]):
            attribute = payload["attribute"]
            for polarity, key in (("high", "top"), ("low", "bottom")):
                sign = POLARITY_SIGN[polarity]
                for rank, entry in enumerate(payload[key]):
                    image_id = entry["image_id"]
                    overlay = saliency_dir / overlay_filename(image_id, method, sign)
                    if not overlay.exists():
                        missing.append(image_id)
                        continue
                    tasks.append(
                        AnnotationTask(
                            task_id=f"{attribute}_{polarity}_{rank:04d}",
                            image_id=image_id,
                            attribute=attribute,
                            polarity=polarity,
                            method=method,
                            sign=sign,
                            overlay_url=f"/media/{image_id}/{method}_{sign}_overlay.png",
                            original_url=f"/media/{image_id}/original.png",
                        )
                    )
        if missing:
            raise FileNotFoundError(
                f"missing {method} overlays for image(s): {', '.join(sorted(set(missing)))}"
            )
        session = Session(session_id=uuid.uuid4().hex, annotator_id=annotator_id, tasks=tasks)
        with self._lock:
            self.sessions[session.session_id] = session
        return session

    def get_session(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"unknown session {session_id!r}") from None

    def next_task(self, session_id: str) -> AnnotationTask | None:
        return self.get_session(session_id).next_pending()

    def submit(self, session_id: str, task_id: str, labels, empty: bool = False) -> AnnotationRecord:
        """Persist one submission and mark its task done.

        Labels are normalized into a set; an empty set is only legal with the
        explicit ``empty`` flag (no identifiable object). A second submission
        for a done task is a conflict, so retries cannot duplicate records.
        """
        session = self.get_session(session_id)
        with self._lock:
            task = next((t for t in session.tasks if t.task_id == task_id), None)
            if task is None:
                raise UnknownTaskError(f"unknown task {task_id!r} in session {session_id!r}")
            if task.status == "done":
                raise TaskConflictError(f"task {task_id!r} was already submitted")
            label_set = normalize_labels(labels)
            if not label_set and not empty:
                raise EmptySubmissionError(
                    "no labels after normalization; set empty=true to record that "
                    "no identifiable object is highlighted"
                )
            record = AnnotationRecord(
                task_id=task.task_id,
                image_id=task.image_id,
                attribute=task.attribute,
                polarity=task.polarity,
                model=self.model_ref,
                annotator_id=session.annotator_id,
                labels=label_set,
            )
            append_record(self.store_path, record)
            task.status = "done"
            return record
