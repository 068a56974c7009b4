# cython: boundscheck=False, wraparound=False, cdivision=True
"""Fused top-k cosine scan over a row-normalized embedding matrix.

One pass computes each candidate row's dot product against the unit query and
keeps a small insertion-sorted best-k, ordered by (score descending, row
index ascending). Avoids materializing the full score vector and the full
sort the numpy fallback performs.

Scores are quantized to a 1e-9 grid before ranking: mathematically equal
cosines can differ in the last ulp depending on summation order, and without
quantization the declared index tie-break would never engage.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport rint

cnp.import_array()


def topk_scan(double[:, ::1] matrix, double[::1] query, int k, candidates=None):
    cdef cnp.int64_t[::1] cand_view
    cdef Py_ssize_t n_rows = matrix.shape[0]
    cdef Py_ssize_t dim = matrix.shape[1]
    cdef Py_ssize_t n_cand
    cdef bint use_cand = candidates is not None

    if use_cand:
        cand_view = candidates
        n_cand = cand_view.shape[0]
    else:
        cand_view = np.empty(0, dtype=np.int64)
        n_cand = n_rows

    if n_cand == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)

    cdef Py_ssize_t keep = k if k < n_cand else n_cand
    best_idx_arr = np.empty(keep, dtype=np.int64)
    best_score_arr = np.empty(keep, dtype=np.float64)
    cdef cnp.int64_t[::1] best_idx = best_idx_arr
    cdef double[::1] best_score = best_score_arr

    cdef Py_ssize_t filled = 0
    cdef Py_ssize_t i, j, pos, row
    cdef double score
    cdef cnp.int64_t ridx

    for i in range(n_cand):
        if use_cand:
            row = <Py_ssize_t> cand_view[i]
        else:
            row = i
        score = 0.0
        for j in range(dim):
            score += matrix[row, j] * query[j]
        score = rint(score * 1e9) * 1e-9
        ridx = <cnp.int64_t> row

        if filled == keep:
            # worst kept entry is at the tail; skip rows that cannot enter
            if score < best_score[keep - 1]:
                continue
            if score == best_score[keep - 1] and ridx > best_idx[keep - 1]:
                continue
            pos = keep - 1
        else:
            pos = filled
            filled += 1
        # insertion: shift entries that rank worse than the new one
        while pos > 0 and (
            best_score[pos - 1] < score
            or (best_score[pos - 1] == score and best_idx[pos - 1] > ridx)
        ):
            best_score[pos] = best_score[pos - 1]
            best_idx[pos] = best_idx[pos - 1]
            pos -= 1
        best_score[pos] = score
        best_idx[pos] = ridx

    return best_idx_arr, best_score_arr
