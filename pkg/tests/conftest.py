import numpy as np
import pytest

from macoir import ConceptCatalog, ConceptEntry, EmbeddingMatrix


def make_blobs(n_blobs, per_blob, dim, seed, spread=10.0, noise=0.1):
    """Well-separated Gaussian blobs; returns (matrix, blob label per row)."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(n_blobs, dim)) * spread
    rows, labels = [], []
    for b in range(n_blobs):
        for _ in range(per_blob):
            rows.append(centers[b] + rng.normal(size=dim) * noise)
            labels.append(b)
    return np.array(rows, dtype=np.float64), np.array(labels)


def make_catalog_with_embeddings(points, prefix="C"):
    """Wrap a points matrix as a catalog + embedding matrix with padded ids."""
    width = len(str(len(points) - 1))
    ids = [f"{prefix}{i:0{width}d}" for i in range(len(points))]
    catalog = ConceptCatalog([ConceptEntry(id=i, name=f"concept {i}") for i in ids])
    emb = EmbeddingMatrix(ids, np.asarray(points, dtype=np.float32))
    return catalog, emb


@pytest.fixture
def blob_catalog():
    points, blob_of = make_blobs(n_blobs=5, per_blob=5, dim=8, seed=11)
    catalog, emb = make_catalog_with_embeddings(points)
    return catalog, emb, blob_of
