#!/usr/bin/env python3
"""Regenerate the bundled toy fixtures under fixtures/toy/.

Fifty concepts in five well-separated 16-dim families, three passages with
gold annotations, multi-level queries, claims with pre-mined excerpts, and a
training-concept list that leaves family 4 unseen. Everything is derived from
fixed seeds so the files are reproducible byte for byte.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from macoir import ConceptCatalog, ConceptEntry, EmbeddingMatrix, save_catalog, write_embeddings
from macoir.embeddings import cosine

OUT = Path(__file__).resolve().parents[1] / "fixtures" / "toy"

N_FAMILIES = 5
PER_FAMILY = 10
DIM = 16

FAMILY_THEMES = [
    "cytokine signalling",
    "membrane transport",
    "oxidative stress response",
    "protein degradation",
    "vascular remodelling",
]


def concept_id(i: int) -> str:
    return f"TOY_{i + 1:04d}"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240)

    centers = rng.normal(size=(N_FAMILIES, DIM)) * 8.0
    entries = []
    vectors = []
    ids = []
    for f in range(N_FAMILIES):
        head = concept_id(f * PER_FAMILY)
        for j in range(PER_FAMILY):
            cid = concept_id(f * PER_FAMILY + j)
            if j == 0:
                name = FAMILY_THEMES[f]
                parents = ()
                synonyms = (f"{FAMILY_THEMES[f]} pathway",)
            else:
                name = f"{FAMILY_THEMES[f]} variant {j}"
                parents = (head,)
                synonyms = () if j % 3 else (f"{FAMILY_THEMES[f]} form {j}",)
            entries.append(ConceptEntry(id=cid, name=name, synonyms=synonyms, parents=parents))
            vectors.append(centers[f] + rng.normal(size=DIM) * 0.25)
            ids.append(cid)

    catalog = ConceptCatalog(entries)
    emb = EmbeddingMatrix(ids, np.array(vectors, dtype=np.float32))
    save_catalog(catalog, OUT / "ontology.jsonl")
    write_embeddings(emb, OUT / "concepts.bin", OUT / "concepts.ids")

    def fam(f, j):
        return concept_id(f * PER_FAMILY + j)

    gold = {
        "P1": [fam(0, 1), fam(0, 2), fam(0, 5), fam(1, 1), fam(1, 4)],
        "P2": [fam(2, 1), fam(2, 3), fam(2, 6), fam(3, 2), fam(3, 5)],
        "P3": [fam(4, 1), fam(4, 2), fam(4, 7), fam(0, 3), fam(0, 8), fam(2, 9)],
    }
    with open(OUT / "gold.jsonl", "w", encoding="utf-8") as handle:
        for pid, concepts in gold.items():
            handle.write(json.dumps({"passage_id": pid, "concepts": concepts}) + "\n")

    train = [concept_id(i) for i in range(4 * PER_FAMILY)]  # families 0-3 seen
    (OUT / "train_concepts.txt").write_text("".join(c + "\n" for c in train), encoding="utf-8")

    def vec_of(cid):
        return emb.vector(cid).astype(np.float64)

    def mean_of(cids, noise):
        return np.mean([vec_of(c) for c in cids], axis=0) + rng.normal(size=DIM) * noise

    queries = []
    qvecs = {}

    def add_query(qid, pid, level, text, vector):
        queries.append({"qid": qid, "passage_id": pid, "level": level, "text": text})
        qvecs[qid] = vector

    for idx, (pid, concepts) in enumerate(gold.items(), start=1):
        add_query(f"p{idx}", pid, "passage", f"passage text for {pid}",
                  mean_of(concepts, 0.05))
        add_query(f"c{idx}a", pid, "claim", f"first claim derived from {pid}",
                  mean_of(concepts[:2], 0.05))
        add_query(f"c{idx}b", pid, "claim", f"second claim derived from {pid}",
                  mean_of(concepts[-2:], 0.05))
        add_query(f"n{idx}a", pid, "concept", f"phrase close to {concepts[0]}",
                  vec_of(concepts[0]) + rng.normal(size=DIM) * 0.02)
        add_query(f"n{idx}b", pid, "concept", f"phrase close to {concepts[3]}",
                  vec_of(concepts[3]) + rng.normal(size=DIM) * 0.02)
    add_query("m1", "P1", "mention", "verbatim mention of the second concept",
              vec_of(gold["P1"][1]) + rng.normal(size=DIM) * 0.01)

    with open(OUT / "queries.jsonl", "w", encoding="utf-8") as handle:
        for record in queries:
            handle.write(json.dumps(record) + "\n")
    qmat = EmbeddingMatrix(
        [q["qid"] for q in queries],
        np.array([qvecs[q["qid"]] for q in queries], dtype=np.float32),
    )
    write_embeddings(qmat, OUT / "queries.bin", OUT / "queries.ids")

    # claims with pre-mined excerpts for the augmentation matcher
    claims = [
        {
            "passage_id": "P1",
            "claim": "Cytokine signalling variant activity rises sharply in this setting.",
            "excerpts": ["cytokine signalling variant activity", "rises sharply"],
        },
        {
            "passage_id": "P1",
            "claim": "Two related signalling variants act together.",
            "excerpts": ["two related signalling variants", "act together"],
        },
        {
            "passage_id": "P2",
            "claim": "Oxidative stress response weakly echoes transport changes.",
            "excerpts": ["oxidative stress response echo", "transport changes"],
        },
        {
            "passage_id": "P3",
            "claim": "An unrelated observation about methodology.",
            "excerpts": ["unrelated observation", "methodology"],
        },
    ]
    with open(OUT / "claims.jsonl", "w", encoding="utf-8") as handle:
        for record in claims:
            handle.write(json.dumps(record) + "\n")

    def blend(cid, weight):
        """Vector at a controlled cosine to concept cid: weight 1 -> identical."""
        other = rng.normal(size=DIM)
        other /= np.linalg.norm(other)
        base = vec_of(cid) / np.linalg.norm(vec_of(cid))
        mixed = weight * base + (1 - weight) * other
        return mixed * 4.0

    excerpt_vecs = {
        "cytokine signalling variant activity": vec_of(gold["P1"][0]),      # cos 1.0
        "rises sharply": rng.normal(size=DIM) * 2,                           # noise
        "two related signalling variants": blend(gold["P1"][1], 0.9),        # high cos
        "act together": blend(gold["P1"][2], 0.85),                          # high cos
        "oxidative stress response echo": blend(gold["P2"][0], 0.75),        # mid cos
        "transport changes": rng.normal(size=DIM) * 2,                       # noise
        "unrelated observation": rng.normal(size=DIM) * 2,
        "methodology": rng.normal(size=DIM) * 2,
    }
    emat = EmbeddingMatrix(
        list(excerpt_vecs),
        np.array(list(excerpt_vecs.values()), dtype=np.float32),
    )
    write_embeddings(emat, OUT / "excerpts.bin", OUT / "excerpts.ids")

    # sanity: families are separated and the engineered excerpts clear 0.5
    for f in range(N_FAMILIES):
        inside = cosine(vec_of(fam(f, 1)), vec_of(fam(f, 2)))
        outside = cosine(vec_of(fam(f, 1)), vec_of(fam((f + 1) % N_FAMILIES, 1)))
        assert inside > 0.9, (f, inside)
        assert outside < 0.5, (f, outside)
    assert cosine(excerpt_vecs["two related signalling variants"], vec_of(gold["P1"][1])) >= 0.5
    assert cosine(excerpt_vecs["oxidative stress response echo"], vec_of(gold["P2"][0])) >= 0.5
    assert cosine(excerpt_vecs["unrelated observation"], vec_of(gold["P3"][0])) < 0.5

    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
