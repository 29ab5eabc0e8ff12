from .app import create_app
from .runs import RunDirectory
from .sessions import (
    AnnotationTask,
    EmptySubmissionError,
    Session,
    SessionManager,
    TaskConflictError,
    UnknownSessionError,
    UnknownTaskError,
)

__all__ = [
    "AnnotationTask",
    "EmptySubmissionError",
    "RunDirectory",
    "Session",
    "SessionManager",
    "TaskConflictError",
    "UnknownSessionError",
    "UnknownTaskError",
    "create_app",
]
