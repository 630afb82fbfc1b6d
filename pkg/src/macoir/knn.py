"""Exact brute-force kNN over concept vectors with a similarity gate.

Candidates are ranked by ascending Euclidean distance (ties by concept id),
the top k are retrieved, and retrieved concepts whose cosine similarity falls
below the threshold are dropped as non-predictions. Both numbers are reported
per hit; on unit-normalized embeddings the two orderings coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .embeddings import EmbeddingMatrix, cosine_to_rows
from .errors import ConfigError


@dataclass(frozen=True)
class KnnConfig:
    k: int = 10
    threshold: float = 0.6

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not -1.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [-1, 1], got {self.threshold}")


@dataclass(frozen=True)
class KnnHit:
    concept_id: str
    cosine: float
    euclidean: float


def knn_query(query_vec, emb: EmbeddingMatrix, cfg: KnnConfig) -> list[KnnHit]:
    if len(emb) == 0:
        raise ConfigError("embedding matrix is empty")
    query_vec = np.asarray(query_vec, dtype=np.float64)
    if query_vec.shape != (emb.dim,):
        raise ValueError(f"query is {query_vec.shape}, concept vectors are {emb.dim}-dim")
    sqdist = kernels.sqdist_to_vec(emb.as_float64(), query_vec)
    sims = cosine_to_rows(emb, query_vec)
    ids = np.array(emb.ids)
    order = np.lexsort((ids, sqdist))  # distance ascending, concept id ascending on ties
    hits = []
    for row in order[: cfg.k]:
        if sims[row] < cfg.threshold:
            continue
        hits.append(
            KnnHit(str(ids[row]), float(sims[row]), float(np.sqrt(sqdist[row])))
        )
    return hits


def knn_batch(queries: EmbeddingMatrix, emb: EmbeddingMatrix, cfg: KnnConfig):
    """Per-query hits in query order: list of (query id, hits)."""
    return [(qid, knn_query(queries.vector(qid), emb, cfg)) for qid in queries.ids]
