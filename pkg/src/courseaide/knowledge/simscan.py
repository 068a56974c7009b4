"""Top-k cosine scan with a compiled fast path.

The compiled kernel is optional: the numpy fallback is selected at import
time when the extension is missing or COURSEAIDE_PURE=1 is set. Both rank by
(score descending, row index ascending), so callers get identical ordering
either way.
"""

from __future__ import annotations

import os

import numpy as np

from . import _simscan_py

if os.environ.get("COURSEAIDE_PURE"):
    _impl = _simscan_py
    USING_NATIVE = False
else:
    try:
        from . import _simscan as _impl  # type: ignore[no-redef]

        USING_NATIVE = True
    except ImportError:
        _impl = _simscan_py
        USING_NATIVE = False


def topk_scan(
    matrix: np.ndarray,
    query: np.ndarray,
    k: int,
    candidates: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Return (row_indices, scores) of the k best rows of `matrix` for `query`.

    `matrix` rows and `query` must already be L2-normalized; `candidates`
    optionally restricts the scan to a subset of row indices. Scores are
    quantized to a 1e-9 grid so mathematically equal cosines compare equal
    regardless of summation order; results are ordered by quantized score
    descending with ties broken by ascending row index.
    """
    if k < 1:
        raise ValueError("k must be positive")
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    query = np.ascontiguousarray(query, dtype=np.float64)
    if matrix.ndim != 2 or query.ndim != 1 or matrix.shape[1] != query.shape[0]:
        raise ValueError(
            f"shape mismatch: matrix {matrix.shape} vs query {query.shape}"
        )
    if candidates is not None:
        candidates = np.ascontiguousarray(candidates, dtype=np.int64)
    return _impl.topk_scan(matrix, query, k, candidates)
