"""Deterministic prompt assembly.

The final prompt is a fixed-order sequence of labeled sections; empty
sections are omitted. When the rendered text exceeds the character budget,
the assembler drops oldest history rounds first, then retrieved contexts from
the lowest rank upward. The user question and developer instructions are
never dropped, and assembly is byte-for-byte deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime

from .config import CourseConfig

DEVELOPER_INSTRUCTIONS = (
    "You are a course assistant. Ground every reply in the course material and "
    "rules provided below, be accurate, and say so plainly when the material "
    "does not cover the question."
)

FOLLOW_UP_DIRECTIVE_OPTIONAL = (
    "If a follow-up question would deepen the student's understanding, you may "
    "end your reply with exactly one such question, placed alone on the final line."
)
FOLLOW_UP_DIRECTIVE_ALWAYS = (
    "End your reply with exactly one follow-up question that deepens the "
    "student's understanding, placed alone on the final line."
)

SECTION_ORDER = (
    "developer_instructions",
    "course_description",
    "educator_rules",
    "active_time_guidance",
    "mode_instruction",
    "retrieved_contexts",
    "history",
    "follow_up_directive",
    "user_question",
)

_HEADERS = {
    "developer_instructions": "[Developer instructions]",
    "course_description": "[Course description]",
    "educator_rules": "[Course rules]",
    "active_time_guidance": "[Current guidance]",
    "mode_instruction": "[Instruction]",
    "history": "[Conversation so far]",
    "follow_up_directive": "[Follow-up]",
    "user_question": "[Question]",
}


class PromptBudgetError(ValueError):
    """The undroppable sections alone exceed the character budget."""


@dataclass
class PromptSections:
    developer_instructions: str
    course_description: str
    educator_rules: str
    active_time_guidance: str
    retrieved_contexts: list[tuple[str, str]]  # (document title, chunk text), rank order
    history: list[tuple[str, str]]  # (role, text), complete rounds, oldest first
    mode_instruction: str
    follow_up_directive: str | None
    user_question: str


@dataclass
class PromptText:
    rendered: str
    section_spans: dict[str, tuple[int, int]]
    total_chars: int


def select_history(messages: list[tuple[str, str]], history_max_rounds: int) -> list[tuple[str, str]]:
    """Keep the most recent complete (user, assistant) rounds, oldest first.

    `messages` are the prior turns of the conversation, excluding the current
    question; a trailing unanswered user message is not a complete round.
    """
    rounds = []
    i = 0
    while i + 1 < len(messages):
        if messages[i][0] == "user" and messages[i + 1][0] == "assistant":
            rounds.append((messages[i], messages[i + 1]))
            i += 2
        else:
            i += 1
    kept = rounds[-history_max_rounds:] if history_max_rounds >= 0 else rounds
    return [turn for round_ in kept for turn in round_]


def active_guidance(config: CourseConfig, now: datetime) -> str:
    """Concatenate guidance texts whose window contains `now`, in config order."""
    active = [w.text for w in config.time_guidance if w.active_from <= now < w.active_to]
    return "\n".join(active)


def mode_instruction_for(decision, config: CourseConfig) -> str:
    """Instruction text for the resolved mode.

    Homework mode and advisory turns both get the hint-only homework
    instruction; the audience note is appended in every mode.
    """
    if decision.mode == "homework" or decision.advisory:
        base = config.mode_instructions["homework"]
    elif decision.mode == "practice":
        base = config.mode_instructions["practice"]
    else:
        base = config.mode_instructions["general"]
    if config.audience_note:
        return f"{base}\n{config.audience_note}"
    return base


def follow_up_directive_for(policy: str) -> str | None:
    if policy == "never":
        return None
    if policy == "always":
        return FOLLOW_UP_DIRECTIVE_ALWAYS
    return FOLLOW_UP_DIRECTIVE_OPTIONAL


def assemble(sections: PromptSections, budget: int) -> PromptText:
    """Render the prompt within `budget` characters.

    Raises PromptBudgetError when even the undroppable sections (everything
    except history and retrieved contexts) cannot fit; that is a
    configuration error, not an input to truncate around.
    """
    if not sections.user_question:
        raise ValueError("user_question must be non-empty")

    current = sections
    while True:
        rendered, spans = _render(current)
        if len(rendered) <= budget:
            return PromptText(rendered=rendered, section_spans=spans, total_chars=len(rendered))
        if current.history:
            # drop the oldest complete round (a user/assistant pair)
            current = replace(current, history=current.history[2:])
        elif current.retrieved_contexts:
            # drop the lowest-ranked (trailing) context first
            current = replace(current, retrieved_contexts=current.retrieved_contexts[:-1])
        else:
            raise PromptBudgetError(
                f"prompt budget {budget} cannot hold the required sections "
                f"({len(rendered)} chars after dropping all history and contexts)"
            )


def _render(sections: PromptSections) -> tuple[str, dict[str, tuple[int, int]]]:
    blocks: list[tuple[str, str]] = []
    for name in SECTION_ORDER:
        if name == "retrieved_contexts":
            if sections.retrieved_contexts:
                parts = [
                    f"[Course material: {title}]\n{text}"
                    for title, text in sections.retrieved_contexts
                ]
                blocks.append((name, "\n\n".join(parts)))
        elif name == "history":
            if sections.history:
                lines = [f"{role}: {text}" for role, text in sections.history]
                blocks.append((name, _HEADERS[name] + "\n" + "\n".join(lines)))
        elif name == "follow_up_directive":
            if sections.follow_up_directive:
                blocks.append((name, _HEADERS[name] + "\n" + sections.follow_up_directive))
        else:
            value = getattr(sections, name)
            if value:
                blocks.append((name, _HEADERS[name] + "\n" + value))

    rendered_parts: list[str] = []
    spans: dict[str, tuple[int, int]] = {}
    cursor = 0
    for i, (name, text) in enumerate(blocks):
        if i > 0:
            rendered_parts.append("\n\n")
            cursor += 2
        spans[name] = (cursor, cursor + len(text))
        rendered_parts.append(text)
        cursor += len(text)
    return "".join(rendered_parts), spans
