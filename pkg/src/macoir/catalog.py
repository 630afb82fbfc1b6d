"""Concept catalog: load/validate the ontology file and derive per-concept ids.

Ontology file format: UTF-8, one JSON object per line with keys
``id``, ``name``, ``synonyms`` and ``parents``. Unknown keys are ignored,
empty lines are skipped, and iteration order is file order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingMatrix
from .errors import CatalogError


@dataclass(frozen=True)
class ConceptEntry:
    id: str
    name: str
    synonyms: tuple[str, ...] = ()
    parents: tuple[str, ...] = ()


class ConceptCatalog:
    """Ordered, id-indexed set of concepts. Immutable after construction."""

    def __init__(self, entries):
        entries = list(entries)
        if not entries:
            raise CatalogError("catalog must contain at least one concept")
        index = {}
        for pos, entry in enumerate(entries):
            if not entry.id:
                raise CatalogError(f"entry at position {pos} has an empty id")
            if entry.id in index:
                raise CatalogError(f"duplicate concept id {entry.id!r}")
            index[entry.id] = pos
        for entry in entries:
            for parent in entry.parents:
                if parent == entry.id:
                    raise CatalogError(f"concept {entry.id!r} lists itself as a parent")
                if parent not in index:
                    raise CatalogError(
                        f"concept {entry.id!r} has dangling parent {parent!r}"
                    )
        self.entries = entries
        self.index = index

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.index

    def get(self, concept_id: str) -> ConceptEntry:
        try:
            return self.entries[self.index[concept_id]]
        except KeyError:
            raise CatalogError(f"unknown concept id {concept_id!r}") from None

    def ids(self) -> list[str]:
        return [entry.id for entry in self.entries]


def _string_list(record, key, line_no):
    value = record.get(key, [])
    if not isinstance(value, list) or any(not isinstance(x, str) for x in value):
        raise CatalogError(f"line {line_no}: {key!r} must be a list of strings")
    return tuple(value)


def load_catalog(path) -> ConceptCatalog:
    entries = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CatalogError(f"line {line_no}: malformed JSON ({exc.msg})") from None
            if not isinstance(record, dict):
                raise CatalogError(f"line {line_no}: record is not a JSON object")
            concept_id = record.get("id")
            name = record.get("name")
            if not isinstance(concept_id, str) or not concept_id:
                raise CatalogError(f"line {line_no}: missing or empty 'id'")
            if not isinstance(name, str):
                raise CatalogError(f"line {line_no}: missing 'name'")
            entries.append(
                ConceptEntry(
                    id=concept_id,
                    name=name,
                    synonyms=_string_list(record, "synonyms", line_no),
                    parents=_string_list(record, "parents", line_no),
                )
            )
    return ConceptCatalog(entries)


def save_catalog(catalog: ConceptCatalog, path) -> None:
    lines = []
    for entry in catalog:
        lines.append(
            json.dumps(
                {
                    "id": entry.id,
                    "name": entry.name,
                    "synonyms": list(entry.synonyms),
                    "parents": list(entry.parents),
                },
                ensure_ascii=False,
            )
        )
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def compose_hypernym_vector(
    concept: ConceptEntry, catalog: ConceptCatalog, emb: EmbeddingMatrix
) -> np.ndarray:
    """Concatenate a concept's own vector with the mean of its direct parents'.

    Output dimension is always 2H. A parentless concept duplicates its own
    vector instead of contributing a zero segment, which would distort
    clustering distances.
    """
    own = emb.vector(concept.id).astype(np.float64)
    if concept.parents:
        stack = np.stack(
            [emb.vector(parent).astype(np.float64) for parent in concept.parents]
        )
        parent_mean = stack.mean(axis=0)
    else:
        parent_mean = own
    return np.concatenate([own, parent_mean])


def assign_random_ids(catalog: ConceptCatalog, seed: int) -> dict[str, int]:
    """Seeded bijection from concept ids onto 0..n-1."""
    rng = np.random.default_rng(seed)
    permutation = rng.permutation(len(catalog))
    return {entry.id: int(permutation[pos]) for pos, entry in enumerate(catalog)}


def assign_ontology_ids(catalog: ConceptCatalog) -> dict[str, str]:
    """Identity mapping: the ontology id doubles as the index string."""
    return {entry.id: entry.id for entry in catalog}
