"""Raw model output -> the structured response shown to users.

Splits fenced code blocks into segments (diagram languages become
placeholders), deduplicates retrieval hits into per-document reference links,
extracts an optional trailing follow-up question, and pins the standing
disclaimer onto every response.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

logger = logging.getLogger("courseaide.responses")

DISCLAIMER = "The responses may contain incorrect information"

# fenced blocks in these languages are rendered by the UI, not the model
DIAGRAM_LANGUAGES = {"mermaid", "graphviz", "dot", "plantuml", "diagram"}

DOCUMENT_LINK_PATTERN = "/courses/{course_id}/documents/{document_id}"


@dataclass(frozen=True)
class Segment:
    kind: str  # "text" | "code" | "diagram_placeholder"
    content: str
    language: str = ""  # fence info string, kept verbatim for round-tripping
    raw: str = ""  # exact source slice of fenced blocks, for lossless reassembly


@dataclass(frozen=True)
class Reference:
    document_id: str
    title: str
    chunk_id: str
    link: str


@dataclass
class StructuredResponse:
    segments: list[Segment]
    references: list[Reference]
    follow_up_question: str | None
    disclaimer: str = DISCLAIMER

    def to_dict(self) -> dict:
        return {
            "segments": [
                {"kind": s.kind, "content": s.content, "language": s.language}
                for s in self.segments
            ],
            "references": [
                {
                    "document_id": r.document_id,
                    "title": r.title,
                    "chunk_id": r.chunk_id,
                    "link": r.link,
                }
                for r in self.references
            ],
            "follow_up_question": self.follow_up_question,
            "disclaimer": self.disclaimer,
        }


def segment(raw: str) -> list[Segment]:
    """Split raw output into text and fenced-code segments, order preserved.

    A fence opens on a line starting with ``` and closes on a line that is
    exactly ```; an unclosed fence falls back to plain text so the original
    content is never lost. Empty input yields a single empty text segment.
    """
    lines = raw.split("\n")
    segments: list[Segment] = []
    text_lines: list[str] = []
    i = 0

    def flush_text():
        if text_lines:
            segments.append(Segment(kind="text", content="\n".join(text_lines)))
            text_lines.clear()

    while i < len(lines):
        line = lines[i]
        if line.startswith("```"):
            close = None
            for j in range(i + 1, len(lines)):
                if lines[j] == "```":
                    close = j
                    break
            if close is None:
                # unbalanced fence: remainder becomes one text segment
                flush_text()
                segments.append(Segment(kind="text", content="\n".join(lines[i:])))
                i = len(lines)
                break
            flush_text()
            language = line[3:]
            kind = "diagram_placeholder" if language.strip().lower() in DIAGRAM_LANGUAGES else "code"
            segments.append(
                Segment(
                    kind=kind,
                    content="\n".join(lines[i + 1 : close]),
                    language=language,
                    raw="\n".join(lines[i : close + 1]),
                )
            )
            i = close + 1
        else:
            text_lines.append(line)
            i += 1
    flush_text()

    if not segments:
        segments.append(Segment(kind="text", content=""))
    return segments


def reassemble(segments: list[Segment]) -> str:
    """Inverse of segment(): reinsert fences and join; used by round-trip checks."""
    blocks = []
    for seg in segments:
        if seg.kind == "text":
            blocks.append(seg.content)
        elif seg.raw:
            blocks.append(seg.raw)
        else:
            inner = seg.content + "\n" if seg.content else ""
            blocks.append(f"```{seg.language}\n{inner}```")
    return "\n".join(blocks)


def attach_references(results, store) -> list[Reference]:
    """One reference per distinct document among the retrieval results.

    Kept in rank order; dangling chunk or document refs are skipped with a
    warning rather than failing the turn.
    """
    references: list[Reference] = []
    seen: set[str] = set()
    for result in results:
        if result.document_id in seen:
            continue
        doc = store.get_document(result.document_id)
        if doc is None:
            logger.warning("retrieval result points at missing document %s", result.document_id)
            continue
        if store.get_chunk(result.chunk_id) is None:
            logger.warning("retrieval result points at missing chunk %s", result.chunk_id)
            continue
        seen.add(result.document_id)
        references.append(
            Reference(
                document_id=doc.id,
                title=doc.title,
                chunk_id=result.chunk_id,
                link=DOCUMENT_LINK_PATTERN.format(course_id=doc.course_id, document_id=doc.id),
            )
        )
    return references


def extract_follow_up(raw: str, policy: str) -> str | None:
    """The final non-empty line, if it ends with '?' and the policy allows it.

    The prompt directive asks the model to put any follow-up question alone
    on its final line, which this mirrors. The line stays in the segments;
    extraction only flags it.
    """
    if policy == "never":
        return None
    for line in reversed(raw.split("\n")):
        stripped = line.strip()
        if stripped:
            return stripped if stripped.endswith("?") else None
    return None


def process(raw: str, retrieval_results, store, follow_up_policy: str) -> StructuredResponse:
    """Full post-processing for one assistant turn."""
    return StructuredResponse(
        segments=segment(raw),
        references=attach_references(retrieval_results, store),
        follow_up_question=extract_follow_up(raw, follow_up_policy),
    )
