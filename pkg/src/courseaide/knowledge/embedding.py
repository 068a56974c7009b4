"""Embedding providers and vector helpers.

Two providers: a deterministic local hash embedder (no network, used by all
tests) and a thin HTTP adapter for hosted embedding models. Both emit
fixed-dimension float64 vectors.
"""

from __future__ import annotations

import hashlib
import os
from typing import Protocol

import numpy as np

DEFAULT_HASH_DIMENSION = 64


class EmbeddingError(Exception):
    """Embedding failed or the input/vector violates a contract."""


class EmbeddingProvider(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


def _bucket(token: str, dimension: int) -> int:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % dimension


class HashEmbedder:
    """Deterministic bag-of-tokens embedder for offline use.

    Each whitespace token is hashed into one of `dimension` buckets, bucket
    counts are L2-normalized. Same text always embeds to the same unit
    vector, and token overlap produces graded cosine similarity, which is all
    the test corpus needs.
    """

    def __init__(self, dimension: int = DEFAULT_HASH_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        tokens = text.split()
        if not tokens:
            raise EmbeddingError("cannot embed empty or whitespace-only text")
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in tokens:
            vec[_bucket(token, self.dimension)] += 1.0
        return vec / np.linalg.norm(vec)


class HttpEmbedder:
    """Adapter for an OpenAI-style embeddings endpoint.

    Configured with an endpoint URL, model identifier, and the name of the
    environment variable holding the API key. Network use is intentionally
    confined to this class.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        dimension: int,
        api_key_env: str = "EMBEDDING_API_KEY",
        timeout_s: float = 30.0,
    ):
        self.endpoint = endpoint
        self.model = model
        self.dimension = dimension
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s

    def embed(self, text: str) -> np.ndarray:
        import httpx

        if not text.strip():
            raise EmbeddingError("cannot embed empty or whitespace-only text")
        headers = {}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = httpx.post(
                self.endpoint,
                json={"model": self.model, "input": text},
                headers=headers,
                timeout=self.timeout_s,
            )
            resp.raise_for_status()
            values = resp.json()["data"][0]["embedding"]
        except Exception as exc:
            raise EmbeddingError(f"embedding request failed: {exc}") from exc
        vec = np.asarray(values, dtype=np.float64)
        if vec.shape != (self.dimension,):
            raise EmbeddingError(
                f"provider returned dimension {vec.shape[0]}, configured {self.dimension}"
            )
        if not np.all(np.isfinite(vec)):
            raise EmbeddingError("provider returned non-finite values")
        return vec


def make_embedder(config: dict) -> EmbeddingProvider:
    """Build an embedding provider from a config mapping.

    ``{"provider": "hash", "dimension": 64}`` or
    ``{"provider": "http", "endpoint": ..., "model": ..., "dimension": ...,
    "api_key_env": ..., "timeout_s": ...}``.
    """
    kind = config.get("provider", "hash")
    if kind == "hash":
        return HashEmbedder(dimension=int(config.get("dimension", DEFAULT_HASH_DIMENSION)))
    if kind == "http":
        return HttpEmbedder(
            endpoint=config["endpoint"],
            model=config["model"],
            dimension=int(config["dimension"]),
            api_key_env=config.get("api_key_env", "EMBEDDING_API_KEY"),
            timeout_s=float(config.get("timeout_s", 30.0)),
        )
    raise ValueError(f"unknown embedding provider {kind!r}")


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two equal-dimension nonzero vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise EmbeddingError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise EmbeddingError("cosine similarity is undefined for a zero vector")
    return float(np.dot(a, b) / (norm_a * norm_b))
