"""Numpy implementation of the top-k cosine scan.

Used whenever the compiled extension is unavailable. Semantics are identical:
given a row-normalized matrix and a unit query, return the k best rows ranked
by (score descending, row index ascending), with scores quantized to the same
1e-9 grid as the compiled kernel so ties are detected identically.
"""

from __future__ import annotations

import numpy as np


def topk_scan(
    matrix: np.ndarray,
    query: np.ndarray,
    k: int,
    candidates: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    if candidates is None:
        indices = np.arange(matrix.shape[0], dtype=np.int64)
        scores = matrix @ query
    else:
        indices = candidates
        scores = matrix[candidates] @ query
    if indices.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    scores = np.rint(scores * 1e9) * 1e-9
    k = min(k, indices.size)
    # lexsort: primary key -score, ties broken by ascending row index
    order = np.lexsort((indices, -scores))[:k]
    return indices[order], scores[order]
