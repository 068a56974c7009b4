"""Conversation records: the interchange layer between service and analytics.

A conversation is an anonymized, ordered list of alternating user/assistant
messages plus metadata. The newline-delimited JSON export defined here is the
single interchange contract: the service exports it, the synthetic generator
emits it, and analytics consumes it. Serialization is canonical (sorted keys,
fixed timestamp format) so export -> import -> export round-trips
byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Iterator

USER_KINDS = ("student", "developer")

# exported records must never carry these keys at any nesting level
PII_DENY_KEYS = frozenset(
    {
        "name",
        "full_name",
        "first_name",
        "last_name",
        "email",
        "phone",
        "address",
        "account_id",
        "username",
        "student_id",
        "ip_address",
    }
)

_TS_FORMAT = "%Y-%m-%dT%H:%M:%S.%fZ"


def format_ts(dt: datetime) -> str:
    """Canonical UTC timestamp; fixed width so exports are byte-stable."""
    if dt.tzinfo is not None:
        dt = dt.astimezone(timezone.utc).replace(tzinfo=None)
    return dt.strftime(_TS_FORMAT)


def parse_ts(value: str) -> datetime:
    try:
        dt = datetime.strptime(value, _TS_FORMAT)
    except ValueError:
        dt = datetime.fromisoformat(value.replace("Z", "+00:00")).replace(tzinfo=None)
    return dt.replace(tzinfo=timezone.utc)


@dataclass
class Message:
    id: str
    role: str  # "user" | "assistant"
    text: str
    created_at: datetime
    metadata: dict = field(default_factory=dict)

    @property
    def is_error_turn(self) -> bool:
        return bool(self.metadata.get("error"))

    @property
    def has_follow_up(self) -> bool:
        return bool(self.metadata.get("has_follow_up"))

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "role": self.role,
            "text": self.text,
            "created_at": format_ts(self.created_at),
            "metadata": self.metadata,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Message":
        return cls(
            id=record["id"],
            role=record["role"],
            text=record["text"],
            created_at=parse_ts(record["created_at"]),
            metadata=record.get("metadata", {}),
        )


@dataclass
class Conversation:
    id: str
    course_id: str
    user_ref: str  # anonymized opaque id, never personal data
    user_kind: str
    mode_at_start: str
    started_at: datetime
    last_activity_at: datetime
    messages: list[Message] = field(default_factory=list)
    shared: bool = False

    def duration_minutes(self) -> float:
        return (self.last_activity_at - self.started_at).total_seconds() / 60.0

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "course_id": self.course_id,
            "user_ref": self.user_ref,
            "user_kind": self.user_kind,
            "mode_at_start": self.mode_at_start,
            "started_at": format_ts(self.started_at),
            "last_activity_at": format_ts(self.last_activity_at),
            "shared": self.shared,
            "messages": [m.to_record() for m in self.messages],
        }

    @classmethod
    def from_record(cls, record: dict) -> "Conversation":
        return cls(
            id=record["id"],
            course_id=record["course_id"],
            user_ref=record["user_ref"],
            user_kind=record["user_kind"],
            mode_at_start=record["mode_at_start"],
            started_at=parse_ts(record["started_at"]),
            last_activity_at=parse_ts(record["last_activity_at"]),
            messages=[Message.from_record(m) for m in record.get("messages", [])],
            shared=bool(record.get("shared", False)),
        )


def rounds(conversation: Conversation) -> int:
    """Dialogue rounds: user messages that received a real assistant reply.

    Error turns do not count as replies; a conversation with no user messages
    has zero rounds. This is the single round definition shared by the
    service and analytics.
    """
    count = 0
    messages = conversation.messages
    for i, msg in enumerate(messages):
        if msg.role != "user":
            continue
        if i + 1 < len(messages):
            reply = messages[i + 1]
            if reply.role == "assistant" and not reply.is_error_turn:
                count += 1
    return count


def question_count(conversation: Conversation) -> int:
    return sum(1 for m in conversation.messages if m.role == "user")


# ── export / import ────────────────────────────────────────────────────────


def record_line(record: dict) -> str:
    """Canonical one-line JSON serialization of an export record."""
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def export_lines(conversations: Iterable[Conversation]) -> Iterator[str]:
    """Conversations as export lines, ordered by (started_at, id)."""
    ordered = sorted(conversations, key=lambda c: (c.started_at, c.id))
    for conv in ordered:
        yield record_line(conv.to_record())


def write_export(conversations: Iterable[Conversation], fh: IO[str]) -> int:
    n = 0
    for line in export_lines(conversations):
        fh.write(line + "\n")
        n += 1
    return n


def read_export(fh: IO[str]) -> list[Conversation]:
    conversations = []
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            conversations.append(Conversation.from_record(json.loads(line)))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed export record on line {lineno}: {exc}") from exc
    return conversations


def load_export(path: str) -> list[Conversation]:
    with open(path, encoding="utf-8") as fh:
        return read_export(fh)


def scan_for_pii_keys(record: dict) -> list[str]:
    """Paths of deny-listed keys anywhere in an export record (empty = clean)."""
    violations: list[str] = []

    def walk(node, path: str) -> None:
        if isinstance(node, dict):
            for key, value in node.items():
                key_path = f"{path}.{key}" if path else key
                if key.lower() in PII_DENY_KEYS:
                    violations.append(key_path)
                walk(value, key_path)
        elif isinstance(node, list):
            for idx, item in enumerate(node):
                walk(item, f"{path}[{idx}]")

    walk(record, "")
    return violations
