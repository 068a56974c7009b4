"""Sqlite persistence for conversations, course configs, and annotations."""

from __future__ import annotations

import json
from datetime import datetime

from ..config import CourseConfig
from ..db import Database
from ..models import Conversation, Message, format_ts, parse_ts

_SCHEMA = """
CREATE TABLE IF NOT EXISTS course_configs (
    course_id TEXT PRIMARY KEY,
    config_json TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS conversations (
    id TEXT PRIMARY KEY,
    course_id TEXT NOT NULL,
    user_ref TEXT NOT NULL,
    user_kind TEXT NOT NULL,
    mode_at_start TEXT NOT NULL,
    started_at TEXT NOT NULL,
    last_activity_at TEXT NOT NULL,
    shared INTEGER NOT NULL DEFAULT 0
);
CREATE INDEX IF NOT EXISTS conversations_course ON conversations (course_id, started_at);
CREATE TABLE IF NOT EXISTS messages (
    id TEXT PRIMARY KEY,
    conversation_id TEXT NOT NULL REFERENCES conversations (id),
    seq INTEGER NOT NULL,
    role TEXT NOT NULL,
    text TEXT NOT NULL,
    created_at TEXT NOT NULL,
    metadata_json TEXT NOT NULL DEFAULT '{}',
    UNIQUE (conversation_id, seq)
);
CREATE TABLE IF NOT EXISTS annotations (
    conversation_id TEXT NOT NULL,
    question_index INTEGER NOT NULL,
    course_id TEXT NOT NULL,
    mode TEXT NOT NULL,
    bloom TEXT NOT NULL,
    correctness TEXT NOT NULL,
    grammatical_error INTEGER NOT NULL,
    polite INTEGER NOT NULL,
    off_topic INTEGER NOT NULL,
    has_example INTEGER NOT NULL,
    llm_question_present INTEGER NOT NULL,
    llm_question_answered INTEGER NOT NULL,
    annotator_id TEXT NOT NULL,
    PRIMARY KEY (conversation_id, question_index, annotator_id)
);
"""


class ConversationStore:
    def __init__(self, db: Database):
        self.db = db
        db.executescript(_SCHEMA)

    # ── course configs ──────────────────────────────────────────────────

    def save_course_config(self, config: CourseConfig) -> None:
        with self.db.transaction() as conn:
            conn.execute(
                "INSERT INTO course_configs (course_id, config_json) VALUES (?, ?)"
                " ON CONFLICT (course_id) DO UPDATE SET config_json = excluded.config_json",
                (config.course_id, json.dumps(config.to_dict())),
            )

    def load_course_configs(self) -> dict[str, CourseConfig]:
        with self.db.read() as conn:
            rows = conn.execute("SELECT course_id, config_json FROM course_configs").fetchall()
        return {
            r["course_id"]: CourseConfig.from_dict(json.loads(r["config_json"])) for r in rows
        }

    # ── conversations ───────────────────────────────────────────────────

    def create_conversation(self, conv: Conversation) -> None:
        with self.db.transaction() as conn:
            self._insert_conversation(conn, conv)

    def get_conversation(self, conversation_id: str) -> Conversation | None:
        with self.db.read() as conn:
            row = conn.execute(
                "SELECT * FROM conversations WHERE id = ?", (conversation_id,)
            ).fetchone()
            if row is None:
                return None
            message_rows = conn.execute(
                "SELECT * FROM messages WHERE conversation_id = ? ORDER BY seq",
                (conversation_id,),
            ).fetchall()
        return _conversation_from_rows(row, message_rows)

    def append_turn(
        self,
        conversation_id: str,
        user_message: Message,
        assistant_message: Message,
        last_activity_at: datetime,
    ) -> None:
        """Persist a user/assistant pair atomically and bump last activity."""
        with self.db.transaction() as conn:
            row = conn.execute(
                "SELECT COALESCE(MAX(seq), -1) AS top FROM messages WHERE conversation_id = ?",
                (conversation_id,),
            ).fetchone()
            seq = int(row["top"]) + 1
            for offset, msg in enumerate((user_message, assistant_message)):
                conn.execute(
                    "INSERT INTO messages (id, conversation_id, seq, role, text, created_at, metadata_json)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?)",
                    (
                        msg.id,
                        conversation_id,
                        seq + offset,
                        msg.role,
                        msg.text,
                        format_ts(msg.created_at),
                        json.dumps(msg.metadata),
                    ),
                )
            conn.execute(
                "UPDATE conversations SET last_activity_at = ? WHERE id = ?",
                (format_ts(last_activity_at), conversation_id),
            )

    def set_shared(self, conversation_id: str, shared: bool) -> None:
        with self.db.transaction() as conn:
            conn.execute(
                "UPDATE conversations SET shared = ? WHERE id = ?",
                (1 if shared else 0, conversation_id),
            )

    def conversations_for_course(
        self,
        course_id: str,
        from_ts: datetime | None = None,
        to_ts: datetime | None = None,
        include_developers: bool = False,
    ) -> list[Conversation]:
        sql = "SELECT * FROM conversations WHERE course_id = ?"
        params: list = [course_id]
        if from_ts is not None:
            sql += " AND started_at >= ?"
            params.append(format_ts(from_ts))
        if to_ts is not None:
            sql += " AND started_at < ?"
            params.append(format_ts(to_ts))
        if not include_developers:
            sql += " AND user_kind != 'developer'"
        sql += " ORDER BY started_at, id"
        with self.db.read() as conn:
            conv_rows = conn.execute(sql, params).fetchall()
            conversations = []
            for row in conv_rows:
                message_rows = conn.execute(
                    "SELECT * FROM messages WHERE conversation_id = ? ORDER BY seq",
                    (row["id"],),
                ).fetchall()
                conversations.append(_conversation_from_rows(row, message_rows))
        return conversations

    def import_conversations(self, conversations: list[Conversation]) -> int:
        """Bulk-load export records, preserving ids and timestamps."""
        with self.db.transaction() as conn:
            for conv in conversations:
                self._insert_conversation(conn, conv)
                for seq, msg in enumerate(conv.messages):
                    conn.execute(
                        "INSERT INTO messages (id, conversation_id, seq, role, text, created_at, metadata_json)"
                        " VALUES (?, ?, ?, ?, ?, ?, ?)",
                        (
                            msg.id,
                            conv.id,
                            seq,
                            msg.role,
                            msg.text,
                            format_ts(msg.created_at),
                            json.dumps(msg.metadata),
                        ),
                    )
        return len(conversations)

    @staticmethod
    def _insert_conversation(conn, conv: Conversation) -> None:
        conn.execute(
            "INSERT INTO conversations (id, course_id, user_ref, user_kind, mode_at_start,"
            " started_at, last_activity_at, shared) VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
            (
                conv.id,
                conv.course_id,
                conv.user_ref,
                conv.user_kind,
                conv.mode_at_start,
                format_ts(conv.started_at),
                format_ts(conv.last_activity_at),
                1 if conv.shared else 0,
            ),
        )

    # ── annotations ─────────────────────────────────────────────────────

    def insert_annotations(self, annotations) -> int:
        with self.db.transaction() as conn:
            for a in annotations:
                conn.execute(
                    "INSERT OR REPLACE INTO annotations (conversation_id, question_index, course_id,"
                    " mode, bloom, correctness, grammatical_error, polite, off_topic, has_example,"
                    " llm_question_present, llm_question_answered, annotator_id)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        a.conversation_id,
                        a.question_index,
                        a.course_id,
                        a.mode,
                        a.bloom,
                        a.correctness,
                        int(a.grammatical_error),
                        int(a.polite),
                        int(a.off_topic),
                        int(a.has_example),
                        int(a.llm_question_present),
                        int(a.llm_question_answered),
                        a.annotator_id,
                    ),
                )
        return len(annotations)

    def annotation_count(self) -> int:
        with self.db.read() as conn:
            row = conn.execute("SELECT COUNT(*) AS n FROM annotations").fetchone()
        return int(row["n"])


def _conversation_from_rows(conv_row, message_rows) -> Conversation:
    return Conversation(
        id=conv_row["id"],
        course_id=conv_row["course_id"],
        user_ref=conv_row["user_ref"],
        user_kind=conv_row["user_kind"],
        mode_at_start=conv_row["mode_at_start"],
        started_at=parse_ts(conv_row["started_at"]),
        last_activity_at=parse_ts(conv_row["last_activity_at"]),
        shared=bool(conv_row["shared"]),
        messages=[
            Message(
                id=m["id"],
                role=m["role"],
                text=m["text"],
                created_at=parse_ts(m["created_at"]),
                metadata=json.loads(m["metadata_json"]),
            )
            for m in message_rows
        ],
    )
