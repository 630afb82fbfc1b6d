import math
import struct

import numpy as np
import pytest

from macoir import EmbeddingIOError, EmbeddingMatrix, cosine, euclidean, load_embeddings, write_embeddings
from macoir.embeddings import MAGIC, cosine_to_rows


def _paths(tmp_path):
    return tmp_path / "m.bin", tmp_path / "m.ids"


def test_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.normal(size=(7, 5)).astype(np.float32)
    # include awkward but finite values
    data[0, 0] = np.float32(1e-30)
    data[1, 1] = np.float32(-0.0)
    data[2, 2] = np.float32(3.4e38)
    m = EmbeddingMatrix([f"r{i}" for i in range(7)], data)
    vec, ids = _paths(tmp_path)
    write_embeddings(m, vec, ids)
    loaded = load_embeddings(vec, ids)
    assert loaded.ids == m.ids
    assert loaded.data.tobytes() == data.tobytes()


def test_round_trip_2x3(tmp_path):
    m = EmbeddingMatrix(["a", "b"], np.arange(6, dtype=np.float32).reshape(2, 3))
    vec, ids = _paths(tmp_path)
    write_embeddings(m, vec, ids)
    loaded = load_embeddings(vec, ids)
    assert np.array_equal(loaded.data, m.data)
    assert loaded.dim == 3


def test_header_count_mismatch(tmp_path):
    vec, ids = _paths(tmp_path)
    payload = np.zeros((5, 2), dtype="<f4").tobytes()
    vec.write_bytes(struct.pack("<8sII", MAGIC, 5, 2) + payload)
    ids.write_text("a\nb\nc\nd\n")  # 4 ids for 5 rows
    with pytest.raises(EmbeddingIOError, match="4 id lines"):
        load_embeddings(vec, ids)


def test_bad_magic(tmp_path):
    vec, ids = _paths(tmp_path)
    vec.write_bytes(b"NOTMAGIC" + struct.pack("<II", 0, 2))
    ids.write_text("")
    with pytest.raises(EmbeddingIOError, match="magic"):
        load_embeddings(vec, ids)


def test_truncated_payload(tmp_path):
    vec, ids = _paths(tmp_path)
    vec.write_bytes(struct.pack("<8sII", MAGIC, 2, 2) + b"\x00" * 8)
    ids.write_text("a\nb\n")
    with pytest.raises(EmbeddingIOError, match="bytes"):
        load_embeddings(vec, ids)


def test_nan_names_row(tmp_path):
    vec, ids = _paths(tmp_path)
    data = np.zeros((3, 2), dtype="<f4")
    data[1, 0] = np.nan
    vec.write_bytes(struct.pack("<8sII", MAGIC, 3, 2) + data.tobytes())
    ids.write_text("a\nb\nc\n")
    with pytest.raises(EmbeddingIOError, match="row 1"):
        load_embeddings(vec, ids)


def test_duplicate_ids_rejected():
    with pytest.raises(EmbeddingIOError, match="duplicate"):
        EmbeddingMatrix(["a", "a"], np.zeros((2, 2), dtype=np.float32))


def test_cosine_analytic_values():
    assert cosine([1, 0], [1, 0]) == pytest.approx(1.0)
    assert cosine([1, 0], [0, 1]) == pytest.approx(0.0)
    assert cosine([1, 1], [1, 0]) == pytest.approx(math.sqrt(2) / 2, abs=1e-4)


def test_cosine_self_is_one():
    rng = np.random.default_rng(1)
    for _ in range(50):
        u = rng.normal(size=rng.integers(2, 20))
        assert cosine(u, u) == pytest.approx(1.0, abs=1e-6)


def test_cosine_errors():
    with pytest.raises(ValueError, match="zero-norm"):
        cosine([0, 0], [1, 0])
    with pytest.raises(ValueError, match="mismatch"):
        cosine([1, 0], [1, 0, 0])


def test_euclidean_345_and_identity():
    assert euclidean([0, 0], [3, 4]) == pytest.approx(5.0)
    assert euclidean([2.5, -1], [2.5, -1]) == 0.0
    with pytest.raises(ValueError, match="mismatch"):
        euclidean([1], [1, 2])


def test_euclidean_is_metric_on_random_triples():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        u, v, w = rng.normal(size=(3, 6))
        duv, dvw, duw = euclidean(u, v), euclidean(v, w), euclidean(u, w)
        assert duv == pytest.approx(euclidean(v, u))        # symmetry
        assert duw <= duv + dvw + 1e-5                       # triangle
        assert duv >= 0.0


def test_cosine_to_rows_matches_scalar():
    rng = np.random.default_rng(3)
    m = EmbeddingMatrix([f"r{i}" for i in range(8)], rng.normal(size=(8, 4)).astype(np.float32))
    q = rng.normal(size=4)
    sims = cosine_to_rows(m, q)
    for i, rid in enumerate(m.ids):
        assert sims[i] == pytest.approx(cosine(m.vector(rid), q), abs=1e-9)
