from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest

from courseaide.db import Database
from courseaide.gateway import Gateway, MockRule, ScriptedMockProvider
from courseaide.knowledge.embedding import HashEmbedder
from courseaide.knowledge.store import KnowledgeStore, RetrievalResult, StoredChunk
from courseaide.models import Conversation, Message
from courseaide.service.pipeline import CourseAssistant

# word pool for deterministic corpora; distinct words may share hash buckets,
# which is fine: the oracle sees the same vectors
WORDS = [f"w{i:03d}" for i in range(400)]


def random_text(rng: random.Random, n_words: int) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(n_words))


@pytest.fixture
def embedder():
    return HashEmbedder()


@pytest.fixture
def db():
    return Database(":memory:")


@pytest.fixture
def store(db, embedder):
    s = KnowledgeStore(db, embedder)
    s.register_course("course-a")
    return s


def make_mock(rules: list[tuple[str, str]] | None = None, default: str = "Scripted default answer.", **kwargs):
    return ScriptedMockProvider(
        rules=[MockRule(contains=c, response=r) for c, r in (rules or [])],
        default_response=default,
        **kwargs,
    )


def make_assistant(
    rules: list[tuple[str, str]] | None = None,
    default: str = "Scripted default answer.",
    clock=None,
    **gateway_kwargs,
) -> tuple[CourseAssistant, ScriptedMockProvider]:
    mock = make_mock(rules, default)
    gateway = Gateway(mock, backoff_s=0.0, **gateway_kwargs)
    assistant = CourseAssistant(Database(":memory:"), HashEmbedder(), gateway, clock=clock)
    return assistant, mock


class FixedScoreStore:
    """Stub knowledge store returning a preset top score, for threshold sweeps."""

    def __init__(self, score: float):
        self.score = score

    def retrieve(self, course_id, question, k=2, kind_filter=None):
        return [RetrievalResult(chunk_id="ch0", document_id="d0", score=self.score, rank=1)]

    def get_chunk(self, chunk_id):
        return StoredChunk(id="ch0", document_id="d0", ordinal=0, start=0, end=4, text="text")

    def get_document(self, document_id):
        return None


def make_conversation(
    conv_id: str = "c1",
    course_id: str = "cs101",
    user_ref: str = "u1",
    user_kind: str = "student",
    mode: str = "general",
    started: datetime | None = None,
    duration_s: int = 0,
    round_count: int = 0,
    follow_up_round: int = 0,  # 1-based round whose reply carries the flag; 0 = none
) -> Conversation:
    started = started or datetime(2024, 2, 5, 14, 30, tzinfo=timezone.utc)
    messages = []
    n = 2 * round_count
    for j in range(n):
        ts = started + timedelta(seconds=duration_s * (j + 1) / n) if n else started
        round_no = j // 2 + 1
        if j % 2 == 0:
            messages.append(
                Message(id=f"{conv_id}-m{j}", role="user", text=f"q{round_no}", created_at=ts,
                        metadata={"mode": mode})
            )
        else:
            messages.append(
                Message(
                    id=f"{conv_id}-m{j}",
                    role="assistant",
                    text=f"a{round_no}",
                    created_at=ts,
                    metadata={"mode": mode, "has_follow_up": round_no == follow_up_round,
                              "advisory_shown": False, "retrieval_ids": []},
                )
            )
    return Conversation(
        id=conv_id,
        course_id=course_id,
        user_ref=user_ref,
        user_kind=user_kind,
        mode_at_start=mode,
        started_at=started,
        last_activity_at=started + timedelta(seconds=duration_s),
        messages=messages,
    )
