"""HTTP+JSON API over the turn pipeline.

Endpoints (all JSON):
    GET  /courses                               list courses
    GET  /courses/{id}                          course config
    PUT  /courses/{id}/config                   replace config        (educator)
    GET  /courses/{id}/documents                list documents
    POST /courses/{id}/documents                ingest a document     (educator)
    POST /courses/{id}/conversations            start a conversation
    POST /conversations/{id}/messages           ask a question
    GET  /conversations/{id}                    fetch a conversation
    POST /conversations/{id}/share              set the share flag    (owner)
    GET  /shared/{id}                           read a shared conversation
    GET  /courses/{id}/export                   newline-delimited export
    GET  /courses/{id}/analytics/{report}       usage | follow_up report

Identity is header-based and minimal: X-User carries the opaque user ref,
X-Role is "student" (default) or "educator". Educator-only endpoints return
403 otherwise; sharing requires the conversation owner.
"""

from __future__ import annotations

from datetime import date, datetime, timezone

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from ..analytics.reports import compute_report, follow_up_report
from ..config import InvalidConfigError
from ..gateway import GatewayError
from ..knowledge.store import IngestionError, UnknownCourseError
from ..models import export_lines, parse_ts
from .pipeline import (
    AuthorizationError,
    CourseAssistant,
    TurnFailedError,
    UnknownConversationError,
    ValidationError,
)


class StartConversationBody(BaseModel):
    user_ref: str
    user_kind: str = "student"
    mode: str = "general"


class PostMessageBody(BaseModel):
    text: str
    selected_documents: list[str] = Field(default_factory=list)
    explicit_mode: str | None = None


class ShareBody(BaseModel):
    shared: bool = True


class DocumentBody(BaseModel):
    title: str
    kind: str
    text: str
    source_uri: str | None = None


def create_app(assistant: CourseAssistant) -> FastAPI:
    app = FastAPI(title="courseaide", version="0.1.0")

    @app.exception_handler(ValidationError)
    def _validation(request: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"error": "validation", "detail": str(exc)})

    @app.exception_handler(InvalidConfigError)
    def _invalid_config(request: Request, exc: InvalidConfigError):
        return JSONResponse(status_code=400, content={"error": "invalid_config", "detail": str(exc)})

    @app.exception_handler(IngestionError)
    def _ingestion(request: Request, exc: IngestionError):
        return JSONResponse(status_code=400, content={"error": "ingestion", "detail": str(exc)})

    @app.exception_handler(UnknownCourseError)
    def _unknown_course(request: Request, exc: UnknownCourseError):
        return JSONResponse(status_code=404, content={"error": "unknown_course", "detail": str(exc)})

    @app.exception_handler(UnknownConversationError)
    def _unknown_conversation(request: Request, exc: UnknownConversationError):
        return JSONResponse(
            status_code=404, content={"error": "unknown_conversation", "detail": str(exc)}
        )

    @app.exception_handler(AuthorizationError)
    def _forbidden(request: Request, exc: AuthorizationError):
        return JSONResponse(status_code=403, content={"error": "forbidden", "detail": str(exc)})

    @app.exception_handler(TurnFailedError)
    def _turn_failed(request: Request, exc: TurnFailedError):
        return JSONResponse(
            status_code=502,
            content={
                "error": "generation_failed",
                "detail": str(exc),
                "conversation_id": exc.conversation_id,
                "message_id": exc.message_id,
            },
        )

    @app.exception_handler(GatewayError)
    def _gateway(request: Request, exc: GatewayError):
        return JSONResponse(status_code=502, content={"error": "gateway", "detail": str(exc)})

    def require_educator(role: str | None) -> None:
        if role != "educator":
            raise AuthorizationError("educator role required")

    # ── courses ─────────────────────────────────────────────────────────

    @app.get("/courses")
    def list_courses():
        out = []
        for course_id in assistant.course_ids():
            config = assistant.get_config(course_id)
            out.append(
                {"course_id": course_id, "name": config.name, "description": config.description}
            )
        return {"courses": out}

    @app.get("/courses/{course_id}")
    def get_course(course_id: str):
        return assistant.get_config(course_id).to_dict()

    @app.put("/courses/{course_id}/config")
    def put_config(course_id: str, body: dict, x_role: str | None = Header(default=None)):
        require_educator(x_role)
        config = assistant.update_course_config(course_id, body)
        return config.to_dict()

    @app.get("/courses/{course_id}/documents")
    def list_documents(course_id: str):
        assistant.get_config(course_id)
        docs = assistant.knowledge.documents(course_id)
        return {
            "documents": [
                {
                    "id": d.id,
                    "title": d.title,
                    "kind": d.kind,
                    "uploaded_at": d.uploaded_at.isoformat(),
                    "chunks": assistant.knowledge.chunk_count(d.id),
                }
                for d in docs
            ]
        }

    @app.post("/courses/{course_id}/documents", status_code=201)
    def upload_document(
        course_id: str, body: DocumentBody, x_role: str | None = Header(default=None)
    ):
        require_educator(x_role)
        doc_id = assistant.upload_document(
            course_id, body.title, body.kind, body.text, body.source_uri
        )
        return {"document_id": doc_id}

    @app.get("/courses/{course_id}/documents/{document_id}")
    def get_document(course_id: str, document_id: str):
        doc = assistant.knowledge.get_document(document_id)
        if doc is None or doc.course_id != course_id:
            raise UnknownCourseError(f"document {document_id} not found in {course_id}")
        return {
            "id": doc.id,
            "course_id": doc.course_id,
            "title": doc.title,
            "kind": doc.kind,
            "text": doc.raw_text,
            "uploaded_at": doc.uploaded_at.isoformat(),
        }

    # ── conversations ───────────────────────────────────────────────────

    @app.post("/courses/{course_id}/conversations", status_code=201)
    def start_conversation(course_id: str, body: StartConversationBody):
        conversation_id = assistant.start_conversation(
            course_id, body.user_ref, body.user_kind, body.mode
        )
        return {"conversation_id": conversation_id}

    @app.post("/conversations/{conversation_id}/messages")
    def post_message(conversation_id: str, body: PostMessageBody):
        result = assistant.post_question(
            conversation_id, body.text, body.selected_documents, body.explicit_mode
        )
        return result.to_dict()

    @app.get("/conversations/{conversation_id}")
    def get_conversation(conversation_id: str):
        return assistant.get_conversation(conversation_id).to_record()

    @app.post("/conversations/{conversation_id}/share")
    def share(
        conversation_id: str, body: ShareBody, x_user: str | None = Header(default=None)
    ):
        conv = assistant.get_conversation(conversation_id)
        if x_user != conv.user_ref:
            raise AuthorizationError("only the conversation owner may change sharing")
        assistant.set_shared(conversation_id, body.shared)
        return {"conversation_id": conversation_id, "shared": body.shared}

    @app.get("/shared/{conversation_id}")
    def shared_view(conversation_id: str):
        conv = assistant.get_conversation(conversation_id)
        if not conv.shared:
            raise UnknownConversationError(conversation_id)
        return conv.to_record()

    # ── export & analytics ──────────────────────────────────────────────

    @app.get("/courses/{course_id}/export")
    def export(
        course_id: str,
        from_: str | None = Query(default=None, alias="from"),
        to: str | None = Query(default=None),
        developers: bool = Query(default=False),
    ):
        conversations = assistant.export_conversations(
            course_id,
            from_ts=parse_ts(from_) if from_ else None,
            to_ts=parse_ts(to) if to else None,
            include_developers=developers,
        )
        body = "".join(line + "\n" for line in export_lines(conversations))
        return PlainTextResponse(body, media_type="application/x-ndjson")

    @app.get("/courses/{course_id}/analytics/{report}")
    def analytics(
        course_id: str,
        report: str,
        semester_start: str | None = Query(default=None),
        tz_offset: float | None = Query(default=None),
        developers: bool = Query(default=False),
    ):
        config = assistant.get_config(course_id)
        conversations = assistant.export_conversations(
            course_id, include_developers=True
        )
        if report == "usage":
            if semester_start:
                start = date.fromisoformat(semester_start)
            elif conversations:
                start = min(c.started_at for c in conversations).date()
            else:
                start = datetime.now(timezone.utc).date()
            offset = tz_offset if tz_offset is not None else config.tz_offset_hours
            usage = compute_report(
                conversations,
                semester_start=start,
                tz_offset_hours=offset,
                exclude_developers=not developers,
            )
            return usage.to_dict()
        if report == "follow_up":
            return follow_up_report(conversations, exclude_developers=not developers)
        return JSONResponse(status_code=404, content={"error": "unknown_report", "detail": report})

    return app
