import numpy as np
import pytest

from macoir import ConfigError, EmbeddingMatrix, KnnConfig, knn_batch, knn_query
from macoir.embeddings import cosine, euclidean


def test_self_retrieval():
    emb = EmbeddingMatrix(["X", "Y"], np.array([[1, 0], [0, 1]], dtype=np.float32))
    hits = knn_query(np.array([1.0, 0.0]), emb, KnnConfig(k=1, threshold=0.6))
    assert [(h.concept_id, h.cosine, h.euclidean) for h in hits] == [("X", 1.0, 0.0)]


def test_orthogonal_query_below_threshold_empty():
    emb = EmbeddingMatrix(["X", "Y"], np.array([[1, 0, 0], [0, 1, 0]], dtype=np.float32))
    hits = knn_query(np.array([0.0, 0.0, 1.0]), emb, KnnConfig(k=5, threshold=0.6))
    assert hits == []


def test_topk_matches_full_sort_oracle():
    rng = np.random.default_rng(6)
    data = rng.normal(size=(100, 12)).astype(np.float32)
    ids = [f"N{i:03d}" for i in range(100)]
    emb = EmbeddingMatrix(ids, data)
    cfg = KnnConfig(k=5, threshold=-1.0)  # no gate: pure ranking check
    for _ in range(20):
        q = rng.normal(size=12)
        hits = knn_query(q, emb, cfg)
        # oracle: python sort over exact distances, ties by id
        oracle = sorted(ids, key=lambda cid: (euclidean(emb.vector(cid), q), cid))[:5]
        assert [h.concept_id for h in hits] == oracle
        for h in hits:
            assert h.cosine == pytest.approx(cosine(emb.vector(h.concept_id), q), abs=1e-9)


def test_gate_applies_after_ranking():
    # nearest by distance but below the cosine gate -> dropped, not replaced
    emb = EmbeddingMatrix(
        ["far_aligned", "near_orthogonal"],
        np.array([[10.0, 0.0], [0.0, 0.5]], dtype=np.float32),
    )
    hits = knn_query(np.array([0.5, 0.0]), emb, KnnConfig(k=1, threshold=0.6))
    assert hits == []  # top-1 is the orthogonal vector, which the gate removes


def test_threshold_monotonicity():
    rng = np.random.default_rng(7)
    emb = EmbeddingMatrix([f"N{i}" for i in range(50)], rng.normal(size=(50, 8)).astype(np.float32))
    q = rng.normal(size=8)
    previous = None
    for threshold in (-1.0, 0.0, 0.3, 0.6, 0.9):
        got = {h.concept_id for h in knn_query(q, emb, KnnConfig(k=10, threshold=threshold))}
        if previous is not None:
            assert got <= previous
        previous = got


def test_distance_ties_broken_by_id():
    emb = EmbeddingMatrix(["B", "A"], np.array([[1, 0], [1, 0]], dtype=np.float32))
    hits = knn_query(np.array([1.0, 0.0]), emb, KnnConfig(k=2, threshold=0.0))
    assert [h.concept_id for h in hits] == ["A", "B"]


def test_batch_matches_single_and_partitioning():
    rng = np.random.default_rng(8)
    emb = EmbeddingMatrix([f"N{i}" for i in range(30)], rng.normal(size=(30, 6)).astype(np.float32))
    queries = EmbeddingMatrix([f"q{i}" for i in range(8)], rng.normal(size=(8, 6)).astype(np.float32))
    cfg = KnnConfig(k=3, threshold=-1.0)
    whole = knn_batch(queries, emb, cfg)
    assert [qid for qid, _ in whole] == queries.ids
    for qid, hits in whole:
        assert hits == knn_query(queries.vector(qid), emb, cfg)
    # batch partitioning independence
    first = EmbeddingMatrix(queries.ids[:4], queries.data[:4])
    second = EmbeddingMatrix(queries.ids[4:], queries.data[4:])
    assert knn_batch(first, emb, cfg) + knn_batch(second, emb, cfg) == whole


def test_empty_batch():
    emb = EmbeddingMatrix(["X"], np.ones((1, 2), dtype=np.float32))
    queries = EmbeddingMatrix([], np.zeros((0, 2), dtype=np.float32))
    assert knn_batch(queries, emb, KnnConfig(k=1)) == []


def test_errors():
    emb = EmbeddingMatrix(["X"], np.ones((1, 2), dtype=np.float32))
    with pytest.raises(ValueError, match="query"):
        knn_query(np.ones(3), emb, KnnConfig(k=1))
    with pytest.raises(ConfigError):
        KnnConfig(k=0)
    with pytest.raises(ConfigError):
        KnnConfig(k=1, threshold=2.0)
