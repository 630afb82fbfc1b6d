"""Top-down hierarchical k-means label tree and ssID assignment.

The tree starts from a root holding every concept. Any node with more than
``g`` members is split into ``min(m, |members|)`` clusters; nodes at or below
``g`` members are terminal. A concept's ssID is the sequence of child-cluster
indices along its root-to-terminal path plus one final digit giving its
position (concept ids ascending) inside the terminal node.

Reproducibility rules, fixed here because library defaults leave them open:
k-means++ seeding from the configured seed, nearest-centroid ties broken by
the lowest centroid index, empty clusters repaired by stealing the point
farthest from its centroid (lowest row index on ties, never emptying a
singleton cluster), and per-node RNG streams derived from seed + tree path so
results are independent of traversal scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .catalog import (
    ConceptCatalog,
    assign_ontology_ids,
    assign_random_ids,
    compose_hypernym_vector,
)
from .codec import SsId
from .embeddings import EmbeddingMatrix
from .errors import ConfigError

INDEX_VARIANTS = ("ssid_name", "ssid_hypernym", "random_id", "ontology_id")


@dataclass(frozen=True)
class IndexerConfig:
    g: int = 10
    m: int = 10
    seed: int = 42
    max_iters: int = 100
    tol: float = 1e-6

    def __post_init__(self):
        if self.g < 1:
            raise ConfigError(f"g must be >= 1, got {self.g}")
        if self.m < 2:
            raise ConfigError(f"m must be >= 2, got {self.m}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")


def _rng_for(seed: int, path: tuple[int, ...]) -> np.random.Generator:
    # one independent, scheduling-invariant stream per tree node
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=path))


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    d2 = kernels.sqdist_to_vec(points, points[chosen[0]])
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        chosen[j] = idx
        d2 = np.minimum(d2, kernels.sqdist_to_vec(points, points[idx]))
    return points[chosen].copy()


def _repair_empty(points, centroids, labels, dists, k):
    counts = np.bincount(labels, minlength=k)
    for j in range(k):
        while counts[j] == 0:
            # steal the point farthest from its centroid, skipping points that
            # are the sole member of their cluster; ties -> lowest row index
            eligible = counts[labels] > 1
            order = np.lexsort((np.arange(len(labels)), -dists))
            candidates = order[eligible[order]]
            if candidates.size == 0:  # pragma: no cover - impossible when n >= k
                raise ConfigError("cannot repair empty cluster: too few points")
            i = int(candidates[0])
            counts[labels[i]] -= 1
            labels[i] = j
            counts[j] += 1
            centroids[j] = points[i]
            dists[i] = 0.0
    return labels, dists


def kmeans(points, k: int, seed, max_iters: int = 100, tol: float = 1e-6):
    """Lloyd's algorithm with k-means++ seeding; every cluster ends non-empty.

    ``seed`` may be an int, a SeedSequence, or a Generator. Returns
    ``(labels, centroids)`` with labels in 0..k-1.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ConfigError("points must be a non-empty 2-D array")
    if not np.isfinite(points).all():
        raise ConfigError("points must be finite")
    n = points.shape[0]
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if k > n:
        raise ConfigError(f"k={k} exceeds the number of points ({n})")
    if isinstance(seed, np.random.Generator):
        rng = seed
    else:
        rng = np.random.default_rng(seed)
    if k == 1:
        return np.zeros(n, dtype=np.int64), points.mean(axis=0, keepdims=True)

    centroids = _kmeans_pp_init(points, k, rng)
    for _ in range(max_iters):
        labels, dists = kernels.assign_nearest(points, centroids)
        labels, dists = _repair_empty(points, centroids, labels, dists, k)
        sums, counts = kernels.centroid_sums(points, labels, k)
        new_centroids = sums / counts[:, None]
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift <= tol:
            break
    labels, dists = kernels.assign_nearest(points, centroids)
    labels, dists = _repair_empty(points, centroids, labels, dists, k)
    return labels, centroids


@dataclass
class TreeNode:
    members: np.ndarray  # concept row indices, ascending
    centroid: np.ndarray
    children: list[int] = field(default_factory=list)
    path: tuple[int, ...] = ()

    @property
    def is_terminal(self) -> bool:
        return not self.children


@dataclass
class LabelTree:
    nodes: list[TreeNode]
    root: int = 0

    def terminals(self):
        return [node for node in self.nodes if node.is_terminal]

    def depth_histogram(self) -> dict[int, int]:
        """Terminal count per depth (root-only tree has depth 0 terminals)."""
        hist: dict[int, int] = {}
        for node in self.terminals():
            depth = len(node.path)
            hist[depth] = hist.get(depth, 0) + 1
        return dict(sorted(hist.items()))


def build_label_tree(points, cfg: IndexerConfig) -> LabelTree:
    """Recursively split any node holding more than ``cfg.g`` points."""
    if isinstance(points, EmbeddingMatrix):
        points = points.as_float64()
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ConfigError("cannot build a label tree over an empty matrix")
    nodes: list[TreeNode] = []

    def build(members: np.ndarray, path: tuple[int, ...]) -> int:
        node_id = len(nodes)
        centroid = points[members].mean(axis=0)
        node = TreeNode(members=members, centroid=centroid, path=path)
        nodes.append(node)
        if members.size > cfg.g:
            k = min(cfg.m, members.size)
            labels, _ = kmeans(
                points[members], k, _rng_for(cfg.seed, path), cfg.max_iters, cfg.tol
            )
            for c in range(k):
                child_members = members[labels == c]
                node.children.append(build(child_members, path + (c,)))
        return node_id

    build(np.arange(points.shape[0], dtype=np.int64), ())
    return LabelTree(nodes=nodes)


def assign_ssids(tree: LabelTree, catalog: ConceptCatalog) -> dict[str, SsId]:
    """Path digits plus a final positional digit, members ordered by id ascending."""
    if tree.nodes[tree.root].members.size != len(catalog):
        raise ConfigError(
            f"tree spans {tree.nodes[tree.root].members.size} rows but catalog has "
            f"{len(catalog)} concepts"
        )
    ids = catalog.ids()
    mapping: dict[str, SsId] = {}
    for node in tree.terminals():
        ordered = sorted(node.members.tolist(), key=lambda row: ids[row])
        for pos, row in enumerate(ordered):
            mapping[ids[row]] = SsId(node.path + (pos,))
    return mapping


def _points_for_variant(variant: str, catalog: ConceptCatalog, emb: EmbeddingMatrix):
    if variant == "ssid_name":
        rows = [emb.vector(entry.id).astype(np.float64) for entry in catalog]
    else:
        rows = [compose_hypernym_vector(entry, catalog, emb) for entry in catalog]
    return np.stack(rows)


def build_ssid_index(
    catalog: ConceptCatalog,
    emb: EmbeddingMatrix,
    cfg: IndexerConfig,
    hypernyms: bool = False,
) -> tuple[LabelTree, dict[str, SsId]]:
    variant = "ssid_hypernym" if hypernyms else "ssid_name"
    points = _points_for_variant(variant, catalog, emb)
    tree = build_label_tree(points, cfg)
    return tree, assign_ssids(tree, catalog)


def build_index_variant(
    variant: str,
    catalog: ConceptCatalog,
    emb: EmbeddingMatrix | None,
    cfg: IndexerConfig,
) -> dict[str, str]:
    """Dispatch to one of the four index types; values are rendered strings."""
    if variant in ("ssid_name", "ssid_hypernym"):
        if emb is None:
            raise ConfigError(f"variant {variant!r} requires embeddings")
        _, ssids = build_ssid_index(catalog, emb, cfg, hypernyms=variant == "ssid_hypernym")
        return {cid: ssid.render() for cid, ssid in ssids.items()}
    if variant == "random_id":
        return {cid: str(num) for cid, num in assign_random_ids(catalog, cfg.seed).items()}
    if variant == "ontology_id":
        return assign_ontology_ids(catalog)
    raise ConfigError(f"unknown index variant {variant!r} (expected one of {INDEX_VARIANTS})")


def write_ssid_map(mapping: dict[str, str], path) -> None:
    """Two-column TSV: concept_id TAB rendered index, in mapping order."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for concept_id, rendered in mapping.items():
            handle.write(f"{concept_id}\t{rendered}\n")


def read_ssid_map(path) -> dict[str, str]:
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ConfigError(f"{path}: line {line_no} is not a two-column record")
            concept_id, rendered = parts
            if concept_id in mapping:
                raise ConfigError(f"{path}: duplicate concept id {concept_id!r} at line {line_no}")
            mapping[concept_id] = rendered
    return mapping


def write_tree_dump(tree: LabelTree, catalog: ConceptCatalog, path) -> None:
    """Debug dump: one line per node with its path and member concept ids."""
    ids = catalog.ids()
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for node in tree.nodes:
            path_str = "-".join(str(d) for d in node.path) or "root"
            members = " ".join(ids[row] for row in node.members.tolist())
            kind = "terminal" if node.is_terminal else "internal"
            handle.write(f"{path_str}\t{kind}\t{members}\n")
