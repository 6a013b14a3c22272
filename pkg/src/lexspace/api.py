"""JSON-over-HTTP surface for the tutor service."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import EngineConfig
from .errors import (
    AlreadyAnswered,
    EmptyText,
    InvalidChoice,
    LexspaceError,
    NotFound,
    PayloadTooLarge,
)
from .service import TutorService

_STATUS_OF = (
    (NotFound, 404),
    (AlreadyAnswered, 409),
    (PayloadTooLarge, 413),
    (InvalidChoice, 400),
    (EmptyText, 400),
    (LexspaceError, 400),
)


class BookUpload(BaseModel):
    title: str
    text: str | None = None
    pretagged: str | None = None


class WarmstartRequest(BaseModel):
    size: int | None = Field(default=None, ge=1)


class WarmstartAnswer(BaseModel):
    family: str
    known: bool


class WarmstartAnswers(BaseModel):
    answers: list[WarmstartAnswer]


class SessionRequest(BaseModel):
    mode: str


class AnswerRequest(BaseModel):
    activity_id: str
    chosen: str


def create_app(service: TutorService | None = None, config: EngineConfig | None = None) -> FastAPI:
    service = service or TutorService(config)
    app = FastAPI(title="lexspace", version="0.1.0")
    app.state.service = service

    @app.exception_handler(LexspaceError)
    async def _engine_error(_: Request, exc: LexspaceError) -> JSONResponse:
        status = next(code for cls, code in _STATUS_OF if isinstance(exc, cls))
        return JSONResponse(status_code=status,
                            content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": "ValueError", "detail": str(exc)})

    @app.post("/books")
    def upload_book(body: BookUpload) -> dict:
        book_id = service.upload_book(body.title, text=body.text, pretagged=body.pretagged)
        return {"book_id": book_id, "status": service.book_status(book_id)["status"]}

    @app.get("/books/{book_id}/status")
    def book_status(book_id: str) -> dict:
        return service.book_status(book_id)

    @app.get("/books/{book_id}/graph")
    def book_graph(book_id: str) -> dict:
        return service.graph_json(book_id)

    @app.post("/learners/{learner_id}/books/{book_id}/warmstart")
    def start_warmstart(learner_id: str, book_id: str, body: WarmstartRequest) -> dict:
        return service.start_warmstart(learner_id, book_id, body.size)

    @app.post("/learners/{learner_id}/books/{book_id}/warmstart/answers")
    def submit_warmstart(learner_id: str, book_id: str, body: WarmstartAnswers) -> dict:
        answers = [(a.family, a.known) for a in body.answers]
        return service.submit_warmstart(learner_id, book_id, answers)

    @app.post("/learners/{learner_id}/books/{book_id}/sessions")
    def start_session(learner_id: str, book_id: str, body: SessionRequest) -> dict:
        return service.start_session(learner_id, book_id, body.mode)

    @app.get("/sessions/{session_id}/next")
    def next_activity(session_id: str) -> dict:
        return service.next_activity(session_id)

    @app.post("/sessions/{session_id}/answers")
    def submit_answer(session_id: str, body: AnswerRequest) -> dict:
        return service.submit_answer(session_id, body.activity_id, body.chosen)

    @app.get("/learners/{learner_id}/books/{book_id}/view")
    def learner_view(learner_id: str, book_id: str, expand: str | None = None) -> dict:
        return service.export_learner_view(learner_id, book_id, expand)

    return app
