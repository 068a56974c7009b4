"""Fixed-size document chunking.

Chunks are contiguous, non-overlapping slices counted in code points, so the
ordered concatenation of chunk texts always reproduces the source exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_CHUNK_SIZE = 4000


@dataclass(frozen=True)
class ChunkSpan:
    """One chunk of a document: its position and the covered text."""

    ordinal: int
    start: int  # half-open [start, end) in code points
    end: int
    text: str


def chunk_document(raw_text: str, chunk_size: int = DEFAULT_CHUNK_SIZE) -> list[ChunkSpan]:
    """Split raw_text into consecutive chunks of chunk_size code points.

    Every chunk except possibly the last has exactly chunk_size characters.
    Empty input yields an empty list.
    """
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    spans = []
    for ordinal, start in enumerate(range(0, len(raw_text), chunk_size)):
        end = min(start + chunk_size, len(raw_text))
        spans.append(ChunkSpan(ordinal=ordinal, start=start, end=end, text=raw_text[start:end]))
    return spans
