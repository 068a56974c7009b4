"""Seeded sampling of conversations for manual annotation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from ..models import Conversation
from .reports import conversation_has_follow_up


@dataclass
class SampleResult:
    ids: list[str]
    shortfall: bool  # fewer eligible conversations than requested


def has_llm_question(conv: Conversation) -> bool:
    """Eligibility predicate for the follow-up engagement sample."""
    return conversation_has_follow_up(conv)


def sample_for_annotation(
    conversations: list[Conversation],
    n: int,
    seed: int,
    predicate: Callable[[Conversation], bool] | None = None,
) -> SampleResult:
    """Uniform sample without replacement, deterministic for a fixed seed.

    When fewer conversations satisfy the predicate than requested, all of
    them are returned with the shortfall flag raised.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    eligible = [c.id for c in conversations if predicate is None or predicate(c)]
    rng = random.Random(seed)
    rng.shuffle(eligible)
    if len(eligible) < n:
        return SampleResult(ids=eligible, shortfall=True)
    return SampleResult(ids=eligible[:n], shortfall=False)
