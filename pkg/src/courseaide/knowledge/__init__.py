"""Course knowledge base: chunking, embedding, and similarity retrieval."""

from .chunking import ChunkSpan, chunk_document
from .embedding import (
    EmbeddingError,
    HashEmbedder,
    HttpEmbedder,
    cosine_similarity,
    make_embedder,
)
from .store import (
    DOCUMENT_KINDS,
    Document,
    IngestionError,
    KnowledgeStore,
    RetrievalResult,
    StoredChunk,
    UnknownCourseError,
)

__all__ = [
    "ChunkSpan",
    "chunk_document",
    "EmbeddingError",
    "HashEmbedder",
    "HttpEmbedder",
    "cosine_similarity",
    "make_embedder",
    "DOCUMENT_KINDS",
    "Document",
    "IngestionError",
    "KnowledgeStore",
    "RetrievalResult",
    "StoredChunk",
    "UnknownCourseError",
]
