import numpy as np
import pytest

from courseaide.knowledge import _simscan_py, simscan


def _random_index(rng, n=200, d=32):
    m = rng.normal(size=(n, d))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    q = rng.normal(size=d)
    q /= np.linalg.norm(q)
    return np.ascontiguousarray(m), np.ascontiguousarray(q)


def test_matches_numpy_fallback_on_random_data():
    rng = np.random.default_rng(11)
    for _ in range(20):
        m, q = _random_index(rng)
        k = int(rng.integers(1, 8))
        idx_a, sc_a = simscan.topk_scan(m, q, k)
        idx_b, sc_b = _simscan_py.topk_scan(m, q, k)
        assert idx_a.tolist() == idx_b.tolist()
        np.testing.assert_allclose(sc_a, sc_b, atol=1e-12)


def test_candidate_subset_restricts_scan():
    rng = np.random.default_rng(5)
    m, q = _random_index(rng)
    cand = np.array(sorted(rng.choice(200, size=37, replace=False)), dtype=np.int64)
    idx, _ = simscan.topk_scan(m, q, 5, cand)
    assert set(idx.tolist()) <= set(cand.tolist())
    idx_b, _ = _simscan_py.topk_scan(m, q, 5, cand)
    assert idx.tolist() == idx_b.tolist()


def test_duplicate_rows_tie_break_by_index():
    rng = np.random.default_rng(7)
    m, q = _random_index(rng, n=10)
    stacked = np.ascontiguousarray(np.vstack([m[3], m[3], m[3], m[0]]))
    idx, scores = simscan.topk_scan(stacked, np.ascontiguousarray(m[3]), 3)
    assert idx.tolist() == [0, 1, 2]
    assert scores[0] == scores[1] == scores[2]


def test_k_larger_than_population():
    rng = np.random.default_rng(9)
    m, q = _random_index(rng, n=3)
    idx, _ = simscan.topk_scan(m, q, 10)
    assert len(idx) == 3


def test_empty_candidates():
    rng = np.random.default_rng(2)
    m, q = _random_index(rng, n=5)
    idx, scores = simscan.topk_scan(m, q, 2, np.empty(0, dtype=np.int64))
    assert idx.size == 0 and scores.size == 0


def test_topk_prefix_property():
    rng = np.random.default_rng(21)
    m, q = _random_index(rng)
    idx2, _ = simscan.topk_scan(m, q, 2)
    idx6, _ = simscan.topk_scan(m, q, 6)
    assert idx6.tolist()[:2] == idx2.tolist()


def test_invalid_inputs():
    rng = np.random.default_rng(1)
    m, q = _random_index(rng, n=4, d=8)
    with pytest.raises(ValueError):
        simscan.topk_scan(m, q, 0)
    with pytest.raises(ValueError):
        simscan.topk_scan(m, np.ones(5), 1)
