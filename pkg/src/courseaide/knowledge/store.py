"""Per-course knowledge store: ingestion, persistence, and top-k retrieval.

Documents are chunked, embedded, and persisted in sqlite; each course keeps
an immutable in-memory index snapshot (a row-normalized embedding matrix plus
chunk metadata) that retrieval scans. Ingestion builds a fresh snapshot and
swaps it atomically, so concurrent readers never observe a partial document.
"""

from __future__ import annotations

import logging
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from ..db import Database
from .chunking import DEFAULT_CHUNK_SIZE, chunk_document
from .embedding import EmbeddingError, EmbeddingProvider
from .simscan import topk_scan

logger = logging.getLogger("courseaide.knowledge")

DOCUMENT_KINDS = ("lecture", "homework", "quiz", "exam", "other")

_SCHEMA = """
CREATE TABLE IF NOT EXISTS kb_courses (
    course_id TEXT PRIMARY KEY
);
CREATE TABLE IF NOT EXISTS kb_documents (
    id TEXT PRIMARY KEY,
    course_id TEXT NOT NULL,
    title TEXT NOT NULL,
    kind TEXT NOT NULL,
    source_uri TEXT,
    raw_text TEXT NOT NULL,
    uploaded_at TEXT NOT NULL,
    active INTEGER NOT NULL DEFAULT 1
);
CREATE INDEX IF NOT EXISTS kb_documents_course ON kb_documents (course_id, active);
CREATE TABLE IF NOT EXISTS kb_chunks (
    id TEXT PRIMARY KEY,
    document_id TEXT NOT NULL REFERENCES kb_documents (id),
    ordinal INTEGER NOT NULL,
    start INTEGER NOT NULL,
    end INTEGER NOT NULL,
    text TEXT NOT NULL,
    embedding BLOB NOT NULL
);
CREATE INDEX IF NOT EXISTS kb_chunks_document ON kb_chunks (document_id, ordinal);
"""


class UnknownCourseError(KeyError):
    """Retrieval or ingestion against a course that was never registered."""


class IngestionError(Exception):
    """Document rejected; nothing was persisted."""


@dataclass(frozen=True)
class Document:
    id: str
    course_id: str
    title: str
    kind: str
    source_uri: str | None
    raw_text: str
    uploaded_at: datetime
    active: bool = True


@dataclass(frozen=True)
class StoredChunk:
    id: str
    document_id: str
    ordinal: int
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class RetrievalResult:
    chunk_id: str
    document_id: str
    score: float
    rank: int


class _IndexSnapshot:
    """Immutable retrieval index for one course.

    Rows are sorted by (document_id, ordinal) so that the scan kernel's
    ascending-row-index tie-break realizes the declared deterministic order.
    """

    def __init__(self, chunks: list[StoredChunk], kinds: list[str], matrix: np.ndarray):
        self.chunks = chunks
        self.kinds = kinds
        self.matrix = matrix
        self._kind_rows: dict[str, np.ndarray] = {}
        for kind in set(kinds):
            rows = np.array([i for i, k in enumerate(kinds) if k == kind], dtype=np.int64)
            self._kind_rows[kind] = rows

    def candidate_rows(self, kind_filter: frozenset[str] | None) -> np.ndarray | None:
        if kind_filter is None:
            return None
        groups = [self._kind_rows[k] for k in sorted(kind_filter) if k in self._kind_rows]
        if not groups:
            return np.empty(0, dtype=np.int64)
        rows = np.concatenate(groups)
        rows.sort()
        return rows


_EMPTY_SNAPSHOT = _IndexSnapshot([], [], np.empty((0, 0), dtype=np.float64))


class KnowledgeStore:
    def __init__(self, db: Database, embedder: EmbeddingProvider, chunk_size: int = DEFAULT_CHUNK_SIZE):
        self.db = db
        self.embedder = embedder
        self.chunk_size = chunk_size
        self._snapshots: dict[str, _IndexSnapshot] = {}
        self._write_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        db.executescript(_SCHEMA)
        self._load_existing()

    # ── course lifecycle ────────────────────────────────────────────────

    def register_course(self, course_id: str) -> None:
        """Create an (initially empty) index for a course. Idempotent."""
        with self.db.transaction() as conn:
            conn.execute("INSERT OR IGNORE INTO kb_courses (course_id) VALUES (?)", (course_id,))
        if course_id not in self._snapshots:
            self._snapshots[course_id] = _EMPTY_SNAPSHOT

    def has_course(self, course_id: str) -> bool:
        return course_id in self._snapshots

    def course_ids(self) -> list[str]:
        return sorted(self._snapshots)

    # ── ingestion ───────────────────────────────────────────────────────

    def ingest_document(
        self,
        course_id: str,
        title: str,
        kind: str,
        raw_text: str,
        source_uri: str | None = None,
    ) -> str:
        """Chunk, embed, and persist one document; returns its id.

        All chunks are embedded before anything is written, so an embedding
        failure aborts the ingestion with no partial chunk set. Re-ingesting
        a title retires the previous version from retrieval.
        """
        if course_id not in self._snapshots:
            raise UnknownCourseError(course_id)
        if not raw_text:
            raise IngestionError("raw_text must be non-empty")
        if kind not in DOCUMENT_KINDS:
            raise IngestionError(f"kind must be one of {DOCUMENT_KINDS}, got {kind!r}")

        spans = chunk_document(raw_text, self.chunk_size)
        try:
            embeddings = [self.embedder.embed(span.text) for span in spans]
        except EmbeddingError as exc:
            raise IngestionError(f"embedding failed, document not ingested: {exc}") from exc

        doc_id = f"doc-{uuid.uuid4().hex[:12]}"
        uploaded_at = datetime.now(timezone.utc)
        with self._write_lock(course_id):
            with self.db.transaction() as conn:
                conn.execute(
                    "UPDATE kb_documents SET active = 0 WHERE course_id = ? AND title = ? AND active = 1",
                    (course_id, title),
                )
                conn.execute(
                    "INSERT INTO kb_documents (id, course_id, title, kind, source_uri, raw_text, uploaded_at, active)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, 1)",
                    (doc_id, course_id, title, kind, source_uri, raw_text, uploaded_at.isoformat()),
                )
                for span, emb in zip(spans, embeddings):
                    conn.execute(
                        "INSERT INTO kb_chunks (id, document_id, ordinal, start, end, text, embedding)"
                        " VALUES (?, ?, ?, ?, ?, ?, ?)",
                        (
                            f"{doc_id}:{span.ordinal}",
                            doc_id,
                            span.ordinal,
                            span.start,
                            span.end,
                            span.text,
                            _normalize(emb).tobytes(),
                        ),
                    )
            self._snapshots[course_id] = self._build_snapshot(course_id)
        return doc_id

    # ── retrieval ───────────────────────────────────────────────────────

    def retrieve(
        self,
        course_id: str,
        query_text: str,
        k: int = 2,
        kind_filter: frozenset[str] | set[str] | None = None,
    ) -> list[RetrievalResult]:
        """Top-k chunks of a course by cosine similarity to the query.

        Ties are broken by (document_id, ordinal) ascending. With a kind
        filter, only chunks of matching document kinds compete.
        """
        snapshot = self._snapshots.get(course_id)
        if snapshot is None:
            raise UnknownCourseError(course_id)
        if not snapshot.chunks:
            return []
        candidates = snapshot.candidate_rows(
            frozenset(kind_filter) if kind_filter is not None else None
        )
        if candidates is not None and candidates.size == 0:
            return []
        query = _normalize(self.embedder.embed(query_text))
        rows, scores = topk_scan(snapshot.matrix, query, k, candidates)
        results = []
        for rank, (row, score) in enumerate(zip(rows, scores), start=1):
            chunk = snapshot.chunks[int(row)]
            results.append(
                RetrievalResult(
                    chunk_id=chunk.id,
                    document_id=chunk.document_id,
                    score=min(1.0, max(-1.0, float(score))),
                    rank=rank,
                )
            )
        return results

    # ── lookups ─────────────────────────────────────────────────────────

    def get_document(self, document_id: str) -> Document | None:
        with self.db.read() as conn:
            row = conn.execute("SELECT * FROM kb_documents WHERE id = ?", (document_id,)).fetchone()
        return _document_from_row(row) if row else None

    def get_chunk(self, chunk_id: str) -> StoredChunk | None:
        with self.db.read() as conn:
            row = conn.execute(
                "SELECT id, document_id, ordinal, start, end, text FROM kb_chunks WHERE id = ?",
                (chunk_id,),
            ).fetchone()
        return StoredChunk(**dict(row)) if row else None

    def documents(self, course_id: str, active_only: bool = True) -> list[Document]:
        sql = "SELECT * FROM kb_documents WHERE course_id = ?"
        if active_only:
            sql += " AND active = 1"
        with self.db.read() as conn:
            rows = conn.execute(sql + " ORDER BY uploaded_at, id", (course_id,)).fetchall()
        return [_document_from_row(r) for r in rows]

    def chunks_for_document(self, document_id: str) -> list[StoredChunk]:
        with self.db.read() as conn:
            rows = conn.execute(
                "SELECT id, document_id, ordinal, start, end, text FROM kb_chunks"
                " WHERE document_id = ? ORDER BY ordinal",
                (document_id,),
            ).fetchall()
        return [StoredChunk(**dict(r)) for r in rows]

    def chunk_count(self, document_id: str) -> int:
        with self.db.read() as conn:
            row = conn.execute(
                "SELECT COUNT(*) AS n FROM kb_chunks WHERE document_id = ?", (document_id,)
            ).fetchone()
        return int(row["n"])

    # ── internals ───────────────────────────────────────────────────────

    def _write_lock(self, course_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._write_locks.setdefault(course_id, threading.Lock())

    def _load_existing(self) -> None:
        with self.db.read() as conn:
            course_ids = [r["course_id"] for r in conn.execute("SELECT course_id FROM kb_courses")]
        for course_id in course_ids:
            self._snapshots[course_id] = self._build_snapshot(course_id)

    def _build_snapshot(self, course_id: str) -> _IndexSnapshot:
        with self.db.read() as conn:
            rows = conn.execute(
                "SELECT c.id, c.document_id, c.ordinal, c.start, c.end, c.text, c.embedding, d.kind"
                " FROM kb_chunks c JOIN kb_documents d ON c.document_id = d.id"
                " WHERE d.course_id = ? AND d.active = 1"
                " ORDER BY c.document_id, c.ordinal",
                (course_id,),
            ).fetchall()
        if not rows:
            return _EMPTY_SNAPSHOT
        chunks = [
            StoredChunk(
                id=r["id"],
                document_id=r["document_id"],
                ordinal=r["ordinal"],
                start=r["start"],
                end=r["end"],
                text=r["text"],
            )
            for r in rows
        ]
        kinds = [r["kind"] for r in rows]
        matrix = np.vstack([np.frombuffer(r["embedding"], dtype=np.float64) for r in rows])
        return _IndexSnapshot(chunks, kinds, np.ascontiguousarray(matrix))


def _normalize(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.float64)
    if not np.all(np.isfinite(vec)):
        raise EmbeddingError("embedding contains non-finite values")
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise EmbeddingError("embedding is the zero vector")
    return vec / norm


def _document_from_row(row) -> Document:
    return Document(
        id=row["id"],
        course_id=row["course_id"],
        title=row["title"],
        kind=row["kind"],
        source_uri=row["source_uri"],
        raw_text=row["raw_text"],
        uploaded_at=datetime.fromisoformat(row["uploaded_at"]),
        active=bool(row["active"]),
    )
