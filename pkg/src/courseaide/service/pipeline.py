"""The turn pipeline tying the backend together.

One question turn runs dispatch -> scoped retrieval -> history selection ->
prompt assembly -> completion -> response processing, then persists the
user/assistant pair atomically with full decision metadata. Per-conversation
turns are serialized; course configs are swapped atomically and read as
snapshots, so an update applies from the next turn onward.
"""

from __future__ import annotations

import logging
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable

from ..config import MODES, CourseConfig, InvalidConfigError
from ..db import Database
from ..dispatch import Dispatcher
from ..gateway import CompletionRequest, Gateway, GatewayError
from ..knowledge.embedding import EmbeddingProvider
from ..knowledge.store import IngestionError, KnowledgeStore, UnknownCourseError
from ..models import USER_KINDS, Conversation, Message, rounds
from ..prompting import (
    DEVELOPER_INSTRUCTIONS,
    PromptSections,
    active_guidance,
    assemble,
    follow_up_directive_for,
    mode_instruction_for,
    select_history,
)
from ..responses import StructuredResponse, process
from .storage import ConversationStore

logger = logging.getLogger("courseaide.service")

RETRIEVAL_TOP_K = 2

ERROR_TURN_TEXT = "The assistant could not generate a response for this turn."


class ValidationError(ValueError):
    """Request rejected before any state change."""


class UnknownConversationError(KeyError):
    pass


class AuthorizationError(PermissionError):
    pass


class TurnFailedError(RuntimeError):
    """The gateway hard-failed; the error turn was persisted."""

    def __init__(self, message: str, conversation_id: str, message_id: str):
        super().__init__(message)
        self.conversation_id = conversation_id
        self.message_id = message_id


@dataclass
class TurnResult:
    conversation_id: str
    message_id: str
    mode: str
    advisory_shown: bool
    rounds: int
    response: StructuredResponse

    def to_dict(self) -> dict:
        return {
            "conversation_id": self.conversation_id,
            "message_id": self.message_id,
            "mode": self.mode,
            "advisory_shown": self.advisory_shown,
            "rounds": self.rounds,
            "response": self.response.to_dict(),
        }


class CourseAssistant:
    """Service façade: course administration, conversations, and turns."""

    def __init__(
        self,
        db: Database,
        embedder: EmbeddingProvider,
        gateway: Gateway,
        clock: Callable[[], datetime] | None = None,
    ):
        self.db = db
        self.gateway = gateway
        self.knowledge = KnowledgeStore(db, embedder)
        self.store = ConversationStore(db)
        self._configs: dict[str, CourseConfig] = self.store.load_course_configs()
        for course_id in self._configs:
            self.knowledge.register_course(course_id)
        self.dispatcher = Dispatcher(self.knowledge, gateway, self.get_config)
        self._clock = clock or (lambda: datetime.now(timezone.utc))
        self._turn_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # ── course administration ───────────────────────────────────────────

    def get_config(self, course_id: str) -> CourseConfig:
        config = self._configs.get(course_id)
        if config is None:
            raise UnknownCourseError(course_id)
        return config

    def course_ids(self) -> list[str]:
        return sorted(self._configs)

    def update_course_config(self, course_id: str, config_data: dict) -> CourseConfig:
        """Create or replace a course config; swapped in atomically."""
        data = dict(config_data)
        data.setdefault("course_id", course_id)
        if data["course_id"] != course_id:
            raise InvalidConfigError(
                f"config course_id {data['course_id']!r} does not match {course_id!r}"
            )
        config = CourseConfig.from_dict(data)
        self.store.save_course_config(config)
        self.knowledge.register_course(course_id)
        self._configs[course_id] = config  # atomic swap; readers hold snapshots
        return config

    def upload_document(
        self, course_id: str, title: str, kind: str, raw_text: str, source_uri: str | None = None
    ) -> str:
        if course_id not in self._configs:
            raise UnknownCourseError(course_id)
        return self.knowledge.ingest_document(course_id, title, kind, raw_text, source_uri)

    # ── conversation lifecycle ──────────────────────────────────────────

    def start_conversation(
        self,
        course_id: str,
        user_ref: str,
        user_kind: str = "student",
        initial_mode: str = "general",
    ) -> str:
        if course_id not in self._configs:
            raise UnknownCourseError(course_id)
        if not user_ref:
            raise ValidationError("user_ref is required")
        if user_kind not in USER_KINDS:
            raise ValidationError(f"user_kind must be one of {USER_KINDS}")
        if initial_mode not in MODES:
            raise ValidationError(f"initial_mode must be one of {MODES}")
        now = self._clock()
        conv = Conversation(
            id=f"conv-{uuid.uuid4().hex[:12]}",
            course_id=course_id,
            user_ref=user_ref,
            user_kind=user_kind,
            mode_at_start=initial_mode,
            started_at=now,
            last_activity_at=now,
        )
        self.store.create_conversation(conv)
        return conv.id

    def get_conversation(self, conversation_id: str) -> Conversation:
        conv = self.store.get_conversation(conversation_id)
        if conv is None:
            raise UnknownConversationError(conversation_id)
        return conv

    def set_shared(self, conversation_id: str, shared: bool) -> None:
        self.get_conversation(conversation_id)
        self.store.set_shared(conversation_id, shared)

    # ── the question turn ───────────────────────────────────────────────

    def post_question(
        self,
        conversation_id: str,
        text: str,
        selected_documents: list[str] | None = None,
        explicit_mode: str | None = None,
    ) -> TurnResult:
        """Run one full turn; persists the user/assistant pair atomically.

        A gateway hard failure still persists the user message together with
        an error assistant turn, then raises TurnFailedError.
        """
        if not text or not text.strip():
            raise ValidationError("question text must be non-empty")
        if explicit_mode is not None and explicit_mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        self.get_conversation(conversation_id)  # 404 before queueing on the lock

        with self._turn_lock(conversation_id):
            # re-read inside the lock: a queued turn must see the prior turn
            conv = self.get_conversation(conversation_id)
            config = self.get_config(conv.course_id)
            now = self._clock()
            decision = self.dispatcher.dispatch(
                conv.course_id, text, selected_documents or [], explicit_mode
            )
            results = self.knowledge.retrieve(
                conv.course_id, text, k=RETRIEVAL_TOP_K, kind_filter=decision.retrieval_kind_filter
            )

            prior = [
                (m.role, m.text)
                for m in conv.messages
                if not (m.role == "assistant" and m.is_error_turn)
            ]
            contexts = []
            for result in results:
                chunk = self.knowledge.get_chunk(result.chunk_id)
                doc = self.knowledge.get_document(result.document_id)
                if chunk is not None and doc is not None:
                    contexts.append((doc.title, chunk.text))

            sections = PromptSections(
                developer_instructions=DEVELOPER_INSTRUCTIONS,
                course_description=config.description,
                educator_rules="\n".join(
                    f"{i}. {rule}" for i, rule in enumerate(config.educator_rules, start=1)
                ),
                active_time_guidance=active_guidance(config, now),
                retrieved_contexts=contexts,
                history=select_history(prior, config.history_max_rounds),
                mode_instruction=mode_instruction_for(decision, config),
                follow_up_directive=follow_up_directive_for(config.follow_up_policy),
                user_question=text,
            )
            prompt = assemble(sections, config.prompt_char_budget)

            user_message = Message(
                id=f"msg-{uuid.uuid4().hex[:12]}",
                role="user",
                text=text,
                created_at=now,
                metadata={"mode": decision.mode},
            )
            base_metadata = {
                "mode": decision.mode,
                "dispatch": decision.to_dict(),
                "retrieval_ids": [r.chunk_id for r in results],
                "advisory_shown": decision.advisory,
            }

            try:
                completion = self.gateway.complete(CompletionRequest(prompt=prompt.rendered))
            except GatewayError as exc:
                assistant_message = Message(
                    id=f"msg-{uuid.uuid4().hex[:12]}",
                    role="assistant",
                    text=ERROR_TURN_TEXT,
                    created_at=self._clock(),
                    metadata={
                        **base_metadata,
                        "has_follow_up": False,
                        "error": True,
                        "error_detail": str(exc),
                    },
                )
                self.store.append_turn(
                    conversation_id, user_message, assistant_message, assistant_message.created_at
                )
                logger.error("turn failed for conversation %s: %s", conversation_id, exc)
                raise TurnFailedError(str(exc), conversation_id, assistant_message.id) from exc

            structured = process(completion.text, results, self.knowledge, config.follow_up_policy)
            assistant_message = Message(
                id=f"msg-{uuid.uuid4().hex[:12]}",
                role="assistant",
                text=completion.text,
                created_at=self._clock(),
                metadata={
                    **base_metadata,
                    "has_follow_up": structured.follow_up_question is not None,
                },
            )
            self.store.append_turn(
                conversation_id, user_message, assistant_message, assistant_message.created_at
            )
            updated = self.get_conversation(conversation_id)
            return TurnResult(
                conversation_id=conversation_id,
                message_id=assistant_message.id,
                mode=decision.mode,
                advisory_shown=decision.advisory,
                rounds=rounds(updated),
                response=structured,
            )

    # ── export ──────────────────────────────────────────────────────────

    def export_conversations(
        self,
        course_id: str,
        from_ts: datetime | None = None,
        to_ts: datetime | None = None,
        include_developers: bool = False,
    ) -> list[Conversation]:
        if course_id not in self._configs:
            raise UnknownCourseError(course_id)
        return self.store.conversations_for_course(
            course_id, from_ts, to_ts, include_developers
        )

    def _turn_lock(self, conversation_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._turn_locks.setdefault(conversation_id, threading.Lock())


__all__ = [
    "CourseAssistant",
    "TurnResult",
    "TurnFailedError",
    "ValidationError",
    "UnknownCourseError",
    "UnknownConversationError",
    "AuthorizationError",
    "IngestionError",
    "RETRIEVAL_TOP_K",
]
