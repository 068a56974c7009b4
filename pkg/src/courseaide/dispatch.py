"""Multi-route question dispatching with homework auto-detection.

Every question resolves to one of three modes (general / homework /
practice). Homework detection is two-stage: a cosine-similarity gate against
the course's homework chunks, then an LLM yes/no check inside the ambiguous
band. A homework-flagged question outside homework mode produces a
non-blocking advisory instead of a refusal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable

from .config import MODES, CourseConfig
from .gateway import Gateway, GatewayError
from .knowledge.store import KnowledgeStore

logger = logging.getLogger("courseaide.dispatch")

NO_MATCH_SIMILARITY = -1.0  # sentinel when the homework corpus is empty

HOMEWORK_KIND_FILTER = frozenset({"homework"})
PRACTICE_KIND_FILTER = frozenset({"quiz", "exam"})

_HOMEWORK_CHECK_TEMPLATE = (
    "A student asked the question below. Is it asking about the homework "
    "assignment excerpted after it?\n\nStudent question:\n{question}\n\n"
    "Homework excerpt:\n{excerpt}"
)


@dataclass(frozen=True)
class HomeworkVerdict:
    is_homework: bool
    max_similarity: float
    matched_chunk: str | None
    llm_consulted: bool
    llm_verdict: bool | None


@dataclass(frozen=True)
class DispatchDecision:
    mode: str
    homework: HomeworkVerdict
    advisory: bool
    retrieval_kind_filter: frozenset[str] | None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "advisory": self.advisory,
            "retrieval_kind_filter": (
                sorted(self.retrieval_kind_filter) if self.retrieval_kind_filter else None
            ),
            "homework": {
                "is_homework": self.homework.is_homework,
                "max_similarity": self.homework.max_similarity,
                "matched_chunk": self.homework.matched_chunk,
                "llm_consulted": self.homework.llm_consulted,
                "llm_verdict": self.homework.llm_verdict,
            },
        }


def resolve_mode(selected_kinds: Iterable[str], explicit_mode: str | None = None) -> str:
    """Mode for a turn: explicit choice wins, else the selected documents decide.

    Homework-kind selections route to homework mode, quiz/exam selections to
    practice mode, anything else to general.
    """
    if explicit_mode is not None:
        if explicit_mode not in MODES:
            raise ValueError(f"unknown mode {explicit_mode!r}")
        return explicit_mode
    kinds = set(selected_kinds)
    if "homework" in kinds:
        return "homework"
    if kinds & {"quiz", "exam"}:
        return "practice"
    return "general"


def kind_filter_for_mode(mode: str) -> frozenset[str] | None:
    if mode == "homework":
        return HOMEWORK_KIND_FILTER
    if mode == "practice":
        return PRACTICE_KIND_FILTER
    return None


class Dispatcher:
    def __init__(
        self,
        store: KnowledgeStore,
        gateway: Gateway,
        config_lookup: Callable[[str], CourseConfig],
    ):
        self.store = store
        self.gateway = gateway
        self._config_lookup = config_lookup

    def detect_homework(self, course_id: str, question: str) -> HomeworkVerdict:
        """Two-stage homework check.

        Stage 1 takes the max cosine similarity between the question and the
        course's homework chunks: at or above the high threshold the verdict
        is homework without consultation, below the low threshold it is not.
        In between, the LLM gateway answers a yes/no relevance question. A
        gateway failure fails open to not-homework with a logged warning.
        """
        config = self._config_lookup(course_id)
        results = self.store.retrieve(course_id, question, k=1, kind_filter=HOMEWORK_KIND_FILTER)
        if not results:
            return HomeworkVerdict(
                is_homework=False,
                max_similarity=NO_MATCH_SIMILARITY,
                matched_chunk=None,
                llm_consulted=False,
                llm_verdict=None,
            )
        top = results[0]
        low, high = config.thresholds
        if top.score >= high:
            return HomeworkVerdict(True, top.score, top.chunk_id, False, None)
        if top.score < low:
            return HomeworkVerdict(False, top.score, top.chunk_id, False, None)

        chunk = self.store.get_chunk(top.chunk_id)
        excerpt = chunk.text[:500] if chunk else ""
        try:
            verdict = self.gateway.yes_no(
                _HOMEWORK_CHECK_TEMPLATE.format(question=question, excerpt=excerpt)
            )
        except GatewayError as exc:
            # fail open: a broken detector must not block questions
            logger.warning(
                "homework detection LLM check failed for course %s, assuming not homework: %s",
                course_id, exc,
            )
            return HomeworkVerdict(False, top.score, top.chunk_id, False, None)
        return HomeworkVerdict(verdict, top.score, top.chunk_id, True, verdict)

    def dispatch(
        self,
        course_id: str,
        question: str,
        selected_documents: Iterable[str] = (),
        explicit_mode: str | None = None,
    ) -> DispatchDecision:
        """Resolve the mode and homework verdict for one question turn.

        Detection runs in every mode so the persisted decision record is
        complete; the advisory flag is raised only when a homework-flagged
        question arrives outside homework mode.
        """
        kinds = []
        for doc_id in selected_documents:
            doc = self.store.get_document(doc_id)
            if doc is not None:
                kinds.append(doc.kind)
        mode = resolve_mode(kinds, explicit_mode)
        verdict = self.detect_homework(course_id, question)
        advisory = verdict.is_homework and mode != "homework"
        return DispatchDecision(
            mode=mode,
            homework=verdict,
            advisory=advisory,
            retrieval_kind_filter=kind_filter_for_mode(mode),
        )
