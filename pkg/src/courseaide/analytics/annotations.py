"""Human annotation labels and their aggregation.

Annotators work outside the system, so annotations arrive as CSV. Each row
labels one user question: its cognitive level (the six-level taxonomy from
Remember up to Create), the response's correctness class, linguistic flags,
and whether an assistant follow-up question appeared and was answered.
Validation happens at ingestion; aggregation assumes valid rows.
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import IO, Iterable

BLOOM_LEVELS = ("Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create")
CORRECTNESS_LABELS = (
    "correct_helpful",
    "unhelpful",
    "erroneous_computational",
    "erroneous_conceptual",
)

CSV_HEADER = [
    "conversation_id",
    "question_index",
    "course_id",
    "mode",
    "bloom",
    "correctness",
    "grammatical_error",
    "polite",
    "off_topic",
    "has_example",
    "llm_question_present",
    "llm_question_answered",
    "annotator_id",
]

_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False}


class AnnotationValidationError(ValueError):
    """A CSV row violates the annotation schema; nothing is ingested."""


@dataclass(frozen=True)
class Annotation:
    conversation_id: str
    question_index: int
    course_id: str
    mode: str
    bloom: str
    correctness: str
    grammatical_error: bool
    polite: bool
    off_topic: bool
    has_example: bool
    llm_question_present: bool
    llm_question_answered: bool
    annotator_id: str

    def validate(self) -> None:
        if self.bloom not in BLOOM_LEVELS:
            raise AnnotationValidationError(f"unknown bloom level {self.bloom!r}")
        if self.correctness not in CORRECTNESS_LABELS:
            raise AnnotationValidationError(f"unknown correctness label {self.correctness!r}")
        if self.question_index < 0:
            raise AnnotationValidationError("question_index must be >= 0")
        if self.llm_question_answered and not self.llm_question_present:
            raise AnnotationValidationError(
                "llm_question_answered requires llm_question_present"
            )


def read_annotations_csv(fh: IO[str]) -> list[Annotation]:
    """Parse and validate an annotation CSV; any bad row rejects the file."""
    reader = csv.DictReader(fh)
    if reader.fieldnames is None or list(reader.fieldnames) != CSV_HEADER:
        raise AnnotationValidationError(
            f"unexpected CSV header {reader.fieldnames}, expected {CSV_HEADER}"
        )
    annotations = []
    for lineno, row in enumerate(reader, start=2):
        try:
            annotation = Annotation(
                conversation_id=row["conversation_id"],
                question_index=int(row["question_index"]),
                course_id=row["course_id"],
                mode=row["mode"],
                bloom=row["bloom"],
                correctness=row["correctness"],
                grammatical_error=_parse_bool(row["grammatical_error"]),
                polite=_parse_bool(row["polite"]),
                off_topic=_parse_bool(row["off_topic"]),
                has_example=_parse_bool(row["has_example"]),
                llm_question_present=_parse_bool(row["llm_question_present"]),
                llm_question_answered=_parse_bool(row["llm_question_answered"]),
                annotator_id=row["annotator_id"],
            )
            annotation.validate()
        except (KeyError, TypeError, ValueError) as exc:
            raise AnnotationValidationError(f"row {lineno}: {exc}") from exc
        annotations.append(annotation)
    return annotations


def load_annotations(path: str) -> list[Annotation]:
    with open(path, newline="", encoding="utf-8") as fh:
        return read_annotations_csv(fh)


def write_annotations_csv(annotations: Iterable[Annotation], fh: IO[str]) -> None:
    writer = csv.writer(fh)
    writer.writerow(CSV_HEADER)
    for a in annotations:
        writer.writerow(
            [
                a.conversation_id,
                a.question_index,
                a.course_id,
                a.mode,
                a.bloom,
                a.correctness,
                str(a.grammatical_error).lower(),
                str(a.polite).lower(),
                str(a.off_topic).lower(),
                str(a.has_example).lower(),
                str(a.llm_question_present).lower(),
                str(a.llm_question_answered).lower(),
                a.annotator_id,
            ]
        )


@dataclass
class AnnotationTables:
    total: int
    bloom_by_course: dict[str, dict[str, float]]
    bloom_by_mode: dict[str, dict[str, float]]
    correctness_shares: dict[str, float]
    correctness_by_course: dict[str, dict[str, float]]
    linguistic_shares: dict[str, float]  # share of questions with each flag set
    example_share: float
    follow_up_present_share: float
    follow_up_answered_share: float | None  # among rows with a follow-up present

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "bloom_by_course": self.bloom_by_course,
            "bloom_by_mode": self.bloom_by_mode,
            "correctness_shares": self.correctness_shares,
            "correctness_by_course": self.correctness_by_course,
            "linguistic_shares": self.linguistic_shares,
            "example_share": self.example_share,
            "follow_up_present_share": self.follow_up_present_share,
            "follow_up_answered_share": self.follow_up_answered_share,
        }


def aggregate_annotations(annotations: list[Annotation]) -> AnnotationTables:
    """Distribution tables over validated annotations.

    Categorical tables (bloom, correctness) are shares over their group and
    sum to 1 per row; boolean flags are reported as the share of rows with
    the flag set. Empty input yields empty tables.
    """
    total = len(annotations)
    if total == 0:
        return AnnotationTables(
            total=0,
            bloom_by_course={},
            bloom_by_mode={},
            correctness_shares={},
            correctness_by_course={},
            linguistic_shares={},
            example_share=0.0,
            follow_up_present_share=0.0,
            follow_up_answered_share=None,
        )

    bloom_course: dict[str, Counter] = defaultdict(Counter)
    bloom_mode: dict[str, Counter] = defaultdict(Counter)
    correctness: Counter = Counter()
    correctness_course: dict[str, Counter] = defaultdict(Counter)
    flags = Counter()
    present = answered = 0

    for a in annotations:
        bloom_course[a.course_id][a.bloom] += 1
        bloom_mode[a.mode][a.bloom] += 1
        correctness[a.correctness] += 1
        correctness_course[a.course_id][a.correctness] += 1
        flags["grammatical_error"] += a.grammatical_error
        flags["polite"] += a.polite
        flags["off_topic"] += a.off_topic
        flags["has_example"] += a.has_example
        present += a.llm_question_present
        answered += a.llm_question_answered

    return AnnotationTables(
        total=total,
        bloom_by_course={c: _shares(counts, BLOOM_LEVELS) for c, counts in sorted(bloom_course.items())},
        bloom_by_mode={m: _shares(counts, BLOOM_LEVELS) for m, counts in sorted(bloom_mode.items())},
        correctness_shares=_shares(correctness, CORRECTNESS_LABELS),
        correctness_by_course={
            c: _shares(counts, CORRECTNESS_LABELS) for c, counts in sorted(correctness_course.items())
        },
        linguistic_shares={
            "grammatical_error": flags["grammatical_error"] / total,
            "polite": flags["polite"] / total,
            "off_topic": flags["off_topic"] / total,
        },
        example_share=flags["has_example"] / total,
        follow_up_present_share=present / total,
        follow_up_answered_share=(answered / present) if present else None,
    )


def _shares(counts: Counter, labels: tuple[str, ...]) -> dict[str, float]:
    group_total = sum(counts.values())
    return {label: counts.get(label, 0) / group_total for label in labels}


def _parse_bool(value: str) -> bool:
    try:
        return _BOOL_VALUES[value.strip().lower()]
    except KeyError:
        raise ValueError(f"expected true/false, got {value!r}") from None
