"""Command-line entry point: index, decode, knn, augment, eval subcommands.

Each stage of the workflow is file-based so ablations compose as shell
pipelines. Every subcommand accepts ``--seed``, ``--config`` (JSON file with
parameter overrides) and ``--threads``, prints a one-line JSON summary to
stdout, sends diagnostics to stderr, and exits nonzero on any module error.

Seed precedence: ``--seed`` flag, then the config file, then the
``MACOIR_SEED`` environment variable, then the fixed default 42.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import kernels
from .augment import load_claims, load_gold, match_claims, emit_training_pairs, write_training_pairs
from .catalog import load_catalog
from .codec import build_vocabulary
from .decoder import (
    BeamConfig,
    constrained_beam_search,
    embedding_oracle_scorer,
    relevance_scorer,
)
from .embeddings import load_embeddings
from .errors import MacoirError
from .evaluation import evaluate_run, load_queries
from .indexer import (
    INDEX_VARIANTS,
    IndexerConfig,
    build_index_variant,
    build_ssid_index,
    read_ssid_map,
    write_ssid_map,
    write_tree_dump,
)
from .knn import KnnConfig, knn_batch

DEFAULT_SEED = 42


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as handle:
        config = json.load(handle)
    if not isinstance(config, dict):
        raise MacoirError(f"{path}: config must be a JSON object")
    return config


def _resolve(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _resolve_seed(flag_value, config: dict) -> int:
    if flag_value is not None:
        return flag_value
    if "seed" in config:
        return int(config["seed"])
    env = os.environ.get("MACOIR_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


def _apply_threads(threads) -> None:
    if threads is None:
        return
    if threads < 1:
        raise MacoirError(f"--threads must be >= 1, got {threads}")
    if kernels.USE_NUMBA:
        import numba

        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def _write_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def _read_jsonl(path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def _summary(payload: dict) -> None:
    print(json.dumps(payload))


def _read_id_set(path) -> set[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return {line.strip() for line in lines if line.strip()}


# ---------------------------------------------------------------------------
# subcommands


def cmd_index(args) -> None:
    config = _load_config(args.config)
    _apply_threads(_resolve(args.threads, config, "threads", None))
    cfg = IndexerConfig(
        g=int(_resolve(args.g, config, "g", 10)),
        m=int(_resolve(args.m, config, "m", 10)),
        seed=_resolve_seed(args.seed, config),
        max_iters=int(_resolve(None, config, "max_iters", 100)),
        tol=float(_resolve(None, config, "tol", 1e-6)),
    )
    catalog = load_catalog(args.ontology)
    summary = {
        "command": "index",
        "variant": args.variant,
        "concepts": len(catalog),
        "out": str(args.out),
        "seed": cfg.seed,
    }
    if args.variant in ("ssid_name", "ssid_hypernym"):
        if not args.embeddings or not args.ids:
            raise MacoirError(f"variant {args.variant!r} requires --embeddings and --ids")
        emb = load_embeddings(args.embeddings, args.ids)
        tree, ssids = build_ssid_index(
            catalog, emb, cfg, hypernyms=args.variant == "ssid_hypernym"
        )
        mapping = {cid: ssid.render() for cid, ssid in ssids.items()}
        summary["depth_histogram"] = tree.depth_histogram()
        if args.tree_dump:
            write_tree_dump(tree, catalog, args.tree_dump)
    else:
        mapping = build_index_variant(args.variant, catalog, None, cfg)
    write_ssid_map(mapping, args.out)
    _summary(summary)


def cmd_decode(args) -> None:
    config = _load_config(args.config)
    _apply_threads(_resolve(args.threads, config, "threads", None))
    beam = BeamConfig(
        beam_width=int(_resolve(args.beam, config, "beam", 1)),
        max_ssids=int(_resolve(args.max_ssids, config, "max_ssids", 16)),
    )
    eos_bias = float(_resolve(args.eos_bias, config, "eos_bias", 0.0))
    mapping = read_ssid_map(args.ssid_map)
    if args.restrict:
        allowed_ids = _read_id_set(args.restrict)
        mapping = {cid: v for cid, v in mapping.items() if cid in allowed_ids}
        if not mapping:
            raise MacoirError("--restrict removed every concept from the ssID map")
    vocab = build_vocabulary(mapping)
    queries = load_queries(args.queries)

    scores_by_qid = None
    concept_emb = None
    query_emb = None
    if args.scores:
        scores_by_qid = {
            str(rec["qid"]): {str(c): float(v) for c, v in rec["scores"].items()}
            for rec in _read_jsonl(args.scores)
        }
    else:
        if not (args.embeddings and args.ids and args.query_embeddings and args.query_ids):
            raise MacoirError(
                "decode needs --embeddings/--ids and --query-embeddings/--query-ids "
                "(or an external --scores file)"
            )
        concept_emb = load_embeddings(args.embeddings, args.ids)
        query_emb = load_embeddings(args.query_embeddings, args.query_ids)

    records = []
    for query in queries:
        if scores_by_qid is not None:
            if query.qid not in scores_by_qid:
                raise MacoirError(f"scores file has no entry for qid {query.qid!r}")
            scorer = relevance_scorer(
                scores_by_qid[query.qid], vocab, eos_bias=eos_bias, default_score=0.0
            )
        else:
            scorer = embedding_oracle_scorer(
                query_emb.vector(query.qid), vocab, concept_emb, eos_bias=eos_bias
            )
        result = constrained_beam_search(query.qid, scorer, vocab, beam)
        records.append(
            {
                "qid": query.qid,
                "sequences": [
                    {"text": seq.text, "score": seq.score} for seq in result.sequences
                ],
            }
        )
    _write_jsonl(records, args.out)
    _summary(
        {
            "command": "decode",
            "queries": len(records),
            "beam": beam.beam_width,
            "vocabulary": len(vocab),
            "out": str(args.out),
        }
    )


def cmd_knn(args) -> None:
    config = _load_config(args.config)
    _apply_threads(_resolve(args.threads, config, "threads", None))
    cfg = KnnConfig(
        k=int(_resolve(args.k, config, "k", 10)),
        threshold=float(_resolve(args.threshold, config, "threshold", 0.6)),
    )
    concept_emb = load_embeddings(args.embeddings, args.ids)
    query_emb = load_embeddings(args.query_embeddings, args.query_ids)
    records = []
    for qid, hits in knn_batch(query_emb, concept_emb, cfg):
        records.append(
            {
                "qid": qid,
                "hits": [
                    {"id": hit.concept_id, "cosine": hit.cosine, "euclidean": hit.euclidean}
                    for hit in hits
                ],
            }
        )
    _write_jsonl(records, args.out)
    _summary(
        {
            "command": "knn",
            "queries": len(records),
            "k": cfg.k,
            "threshold": cfg.threshold,
            "out": str(args.out),
        }
    )


def cmd_augment(args) -> None:
    config = _load_config(args.config)
    threshold = float(_resolve(args.threshold, config, "threshold", 0.5))
    claims = load_claims(args.claims)
    gold = load_gold(args.gold)
    excerpt_emb = load_embeddings(args.excerpt_embeddings, args.excerpt_ids)
    concept_emb = load_embeddings(args.embeddings, args.ids)
    pairs = match_claims(claims, gold, excerpt_emb, concept_emb, threshold=threshold)
    ssid_map = read_ssid_map(args.ssid_map)
    records = emit_training_pairs(pairs, ssid_map)
    write_training_pairs(records, args.out)
    _summary(
        {
            "command": "augment",
            "claims": len(claims),
            "pairs": len(pairs),
            "records": len(records),
            "threshold": threshold,
            "out": str(args.out),
        }
    )


def cmd_eval(args) -> None:
    config = _load_config(args.config)
    ks = [int(x) for x in _resolve(args.ks, config, "ks", "1,5,10").split(",")]
    outputs = _read_jsonl(args.pred)
    queries = load_queries(args.queries)
    gold = load_gold(args.gold)
    vocab = None
    if args.ssid_map:
        vocab = build_vocabulary(read_ssid_map(args.ssid_map))
    train_concepts = _read_id_set(args.train_concepts) if args.train_concepts else None
    report = evaluate_run(outputs, queries, gold, vocab, train_concepts, ks=ks)
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    print(report.format_table(), file=sys.stderr)
    _summary(
        {
            "command": "eval",
            "rows": len(report.rows),
            "ks": ks,
            "out": str(args.out) if args.out else None,
        }
    )


# ---------------------------------------------------------------------------
# argument plumbing


def _add_common(parser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default 42; MACOIR_SEED overrides when absent)")
    parser.add_argument("--config", default=None, help="JSON file with parameter overrides")
    parser.add_argument("--threads", type=int, default=None,
                        help="bound internal parallelism (results are independent of it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macoir", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build an index map over the ontology")
    p.add_argument("--ontology", required=True)
    p.add_argument("--embeddings", help="concept vector file")
    p.add_argument("--ids", help="sidecar ids file for --embeddings")
    p.add_argument("--out", required=True, help="output ssID map TSV")
    p.add_argument("--variant", choices=INDEX_VARIANTS, default="ssid_name")
    p.add_argument("--tree-dump", default=None, help="optional label-tree debug dump")
    p.add_argument("--g", type=int, default=None, help="max members before a node splits")
    p.add_argument("--m", type=int, default=None, help="max clusters per split")
    _add_common(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("decode", help="constrained beam search over queries")
    p.add_argument("--ssid-map", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--embeddings", help="concept vector file (oracle scorer)")
    p.add_argument("--ids", help="sidecar ids for --embeddings")
    p.add_argument("--query-embeddings", help="query vector file, rows keyed by qid")
    p.add_argument("--query-ids", help="sidecar ids for --query-embeddings")
    p.add_argument("--scores", default=None,
                   help="external per-concept scores JSONL instead of the oracle scorer")
    p.add_argument("--restrict", default=None,
                   help="file of concept ids; decode as if only these were known")
    p.add_argument("--out", required=True)
    p.add_argument("--beam", type=int, default=None, help="beam width k")
    p.add_argument("--max-ssids", type=int, default=None)
    p.add_argument("--eos-bias", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("knn", help="exact brute-force retrieval baseline")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--ids", required=True)
    p.add_argument("--query-embeddings", required=True)
    p.add_argument("--query-ids", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("augment", help="pair claims with gold concepts by excerpt similarity")
    p.add_argument("--claims", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--excerpt-embeddings", required=True)
    p.add_argument("--excerpt-ids", required=True)
    p.add_argument("--embeddings", required=True, help="concept vector file")
    p.add_argument("--ids", required=True)
    p.add_argument("--ssid-map", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("eval", help="score predictions against gold annotations")
    p.add_argument("--pred", required=True, help="decode or knn output file")
    p.add_argument("--queries", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--ssid-map", default=None, help="needed for decoder outputs")
    p.add_argument("--train-concepts", default=None,
                   help="file of training concept ids for the seen/unseen split")
    p.add_argument("--ks", default=None, help="comma-separated k values (default 1,5,10)")
    p.add_argument("--out", default=None, help="machine-readable report JSON")
    _add_common(p)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (MacoirError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"macoir {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
