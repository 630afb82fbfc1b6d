"""Semantic search indexing and concept recognition toolkit.

Builds hierarchical-clustering indexes (ssIDs) over ontology concepts,
decodes ssID sequences from queries via grammar-constrained beam search,
retrieves with an exact kNN baseline, mines weakly supervised claim-concept
pairs, and scores predictions with a pooled micro-P/R/F1 protocol.
"""

from .augment import ClaimConceptPair, ClaimRecord, emit_training_pairs, match_claims
from .catalog import (
    ConceptCatalog,
    ConceptEntry,
    assign_ontology_ids,
    assign_random_ids,
    compose_hypernym_vector,
    load_catalog,
    save_catalog,
)
from .codec import (
    EOS_TOKEN,
    SEP_TOKEN,
    ParseResult,
    SsId,
    SsidVocabulary,
    build_vocabulary,
    merge_topk,
    parse_sequence,
    render_sequence,
)
from .decoder import (
    BeamConfig,
    DecodeResult,
    ScoringHead,
    constrained_beam_search,
    embedding_oracle_scorer,
    relevance_scorer,
    score_tokens,
    softmax,
    teacher_scorer,
)
from .embeddings import (
    EmbeddingMatrix,
    cosine,
    cosine_to_rows,
    euclidean,
    load_embeddings,
    write_embeddings,
)
from .errors import (
    CatalogError,
    CodecError,
    ConfigError,
    DecodeError,
    EmbeddingIOError,
    EvalError,
    MacoirError,
    VectorLookupError,
)
from .evaluation import (
    EvalReport,
    QueryRecord,
    aggregate_by_passage,
    evaluate_run,
    micro_prf,
    seen_unseen_recall,
)
from .indexer import (
    IndexerConfig,
    LabelTree,
    assign_ssids,
    build_index_variant,
    build_label_tree,
    build_ssid_index,
    kmeans,
    read_ssid_map,
    write_ssid_map,
)
from .knn import KnnConfig, KnnHit, knn_batch, knn_query

__version__ = "0.1.0"
