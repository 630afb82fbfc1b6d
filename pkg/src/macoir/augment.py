"""Weak-supervision matcher: pair claims with gold concepts via excerpt cosine.

For every claim and every gold concept of the claim's passage, a pair is
emitted iff some excerpt of the claim reaches cosine similarity >= threshold
(inclusive; default 0.5) against the concept vector, recording the maximizing
excerpt. A claim may pair with many concepts and a concept with many claims.
Excerpt mining itself happens upstream; this matcher is a pure function of
its inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .codec import SsId, render_sequence
from .embeddings import EmbeddingMatrix
from .errors import EvalError, VectorLookupError


@dataclass(frozen=True)
class ClaimRecord:
    passage_id: str
    claim: str
    excerpts: tuple[str, ...]

    def __post_init__(self):
        if not self.claim:
            raise EvalError(f"claim for passage {self.passage_id!r} is empty")


@dataclass(frozen=True)
class ClaimConceptPair:
    passage_id: str
    claim: str
    concept_id: str
    excerpt: str
    similarity: float


def load_claims(path) -> list[ClaimRecord]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append(
                ClaimRecord(
                    passage_id=str(obj["passage_id"]),
                    claim=str(obj["claim"]),
                    excerpts=tuple(obj.get("excerpts") or []),
                )
            )
    return records


def load_gold(path) -> dict[str, set[str]]:
    """Gold file: one ``{"passage_id", "concepts"}`` object per line."""
    gold: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            pid = str(obj["passage_id"])
            gold.setdefault(pid, set()).update(str(c) for c in obj.get("concepts", []))
    return gold


def match_claims(
    claims,
    gold: dict[str, set[str]],
    excerpt_emb: EmbeddingMatrix,
    concept_emb: EmbeddingMatrix,
    threshold: float = 0.5,
) -> list[ClaimConceptPair]:
    pairs: list[ClaimConceptPair] = []
    for claim in claims:
        if claim.passage_id not in gold:
            raise EvalError(f"claim references unknown passage {claim.passage_id!r}")
        if not claim.excerpts:
            continue
        vectors = []
        for excerpt in claim.excerpts:
            if excerpt not in excerpt_emb:
                raise VectorLookupError(f"no vector for excerpt {excerpt!r}")
            vectors.append(excerpt_emb.vector(excerpt).astype(np.float64))
        for concept_id in sorted(gold[claim.passage_id]):
            if concept_id not in concept_emb:
                raise VectorLookupError(f"no vector for concept {concept_id!r}")
            cvec = concept_emb.vector(concept_id).astype(np.float64)
            cnorm = np.linalg.norm(cvec)
            best_sim = -np.inf
            best_excerpt = None
            for excerpt, evec in zip(claim.excerpts, vectors):
                enorm = np.linalg.norm(evec)
                if enorm == 0.0 or cnorm == 0.0:
                    raise ValueError(
                        f"cosine undefined for zero-norm vector ({excerpt!r} vs {concept_id!r})"
                    )
                sim = float(np.clip((evec @ cvec) / (enorm * cnorm), -1.0, 1.0))
                if sim > best_sim:  # strict: ties keep the first excerpt
                    best_sim = sim
                    best_excerpt = excerpt
            if best_sim >= threshold:
                pairs.append(
                    ClaimConceptPair(
                        claim.passage_id, claim.claim, concept_id, best_excerpt, best_sim
                    )
                )
    return pairs


def emit_training_pairs(pairs, ssid_map: dict[str, SsId | str]) -> list[dict]:
    """Group pairs by claim into rendered multi-ssID targets.

    Concepts are ordered by id ascending inside each record; claims with no
    pairs are omitted. Output records follow the augmentation file schema.
    """
    grouped: dict[tuple[str, str], list[str]] = {}
    for pair in pairs:
        grouped.setdefault((pair.passage_id, pair.claim), []).append(pair.concept_id)
    records = []
    for (passage_id, claim), concept_ids in grouped.items():
        concept_ids = sorted(set(concept_ids))
        rendered = []
        for concept_id in concept_ids:
            if concept_id not in ssid_map:
                raise EvalError(f"concept {concept_id!r} has no ssID")
            value = ssid_map[concept_id]
            rendered.append(value if isinstance(value, SsId) else SsId.parse(str(value)))
        records.append(
            {
                "passage_id": passage_id,
                "claim": claim,
                "ssids": render_sequence(rendered),
                "concepts": concept_ids,
            }
        )
    return records


def write_training_pairs(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
