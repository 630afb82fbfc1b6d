"""Multi-level-query evaluation: pooled micro P/R/F1 and seen/unseen recall.

Predictions from queries of the selected levels are unioned per passage and
compared against that passage's gold set. Counts are pooled over passages
(micro, not macro). Passages with an empty gold set still contribute false
positives; excluding them would silently inflate precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

from .codec import SsidVocabulary, merge_topk, parse_sequence
from .errors import EvalError

QUERY_LEVELS = ("passage", "claim", "mention", "concept")


@dataclass(frozen=True)
class QueryRecord:
    qid: str
    passage_id: str
    level: str
    text: str

    def __post_init__(self):
        if self.level not in QUERY_LEVELS:
            raise EvalError(
                f"query {self.qid!r} has level {self.level!r}, expected one of {QUERY_LEVELS}"
            )
        if not self.passage_id:
            raise EvalError(f"query {self.qid!r} has an empty passage_id")


def load_queries(path) -> list[QueryRecord]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append(
                QueryRecord(
                    qid=str(obj["qid"]),
                    passage_id=str(obj["passage_id"]),
                    level=str(obj["level"]),
                    text=str(obj.get("text", "")),
                )
            )
    return records


def aggregate_by_passage(predictions, queries, levels) -> dict[str, set[str]]:
    """Union prediction sets over the selected query levels, per passage."""
    by_qid = {q.qid: q for q in queries}
    levels = set(levels)
    merged: dict[str, set[str]] = {q.passage_id: set() for q in queries if q.level in levels}
    for qid, concept_ids in predictions.items():
        query = by_qid.get(qid)
        if query is None:
            raise EvalError(f"prediction for unknown qid {qid!r}")
        if query.level not in levels:
            continue
        merged[query.passage_id].update(concept_ids)
    return merged


@dataclass(frozen=True)
class PrfCounts:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def micro_prf(pred: dict[str, set[str]], gold: dict[str, set[str]]) -> PrfCounts:
    """tp/fp/fn pooled over all passages; a missing prediction is an empty set."""
    tp = fp = fn = 0
    for passage_id in set(pred) | set(gold):
        p = set(pred.get(passage_id, ()))
        g = set(gold.get(passage_id, ()))
        tp += len(p & g)
        fp += len(p - g)
        fn += len(g - p)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PrfCounts(precision, recall, f1, tp, fp, fn)


@dataclass(frozen=True)
class SplitRecall:
    seen_recall: float | None
    unseen_recall: float | None
    seen_gold: int
    unseen_gold: int


def seen_unseen_recall(pred, gold, train_concepts) -> SplitRecall:
    """Recall split over gold items in / not in the training concept set.

    A split with zero gold items reports ``None`` rather than a fake 0/0.
    """
    train_concepts = set(train_concepts)
    seen_tp = seen_total = unseen_tp = unseen_total = 0
    for passage_id, gold_set in gold.items():
        predicted = set(pred.get(passage_id, ()))
        for concept_id in gold_set:
            if concept_id in train_concepts:
                seen_total += 1
                seen_tp += concept_id in predicted
            else:
                unseen_total += 1
                unseen_tp += concept_id in predicted
    return SplitRecall(
        seen_recall=seen_tp / seen_total if seen_total else None,
        unseen_recall=unseen_tp / unseen_total if unseen_total else None,
        seen_gold=seen_total,
        unseen_gold=unseen_total,
    )


# ---------------------------------------------------------------------------
# run-level evaluation


def predictions_from_decode(decode_records, vocab: SsidVocabulary, k: int):
    """Parse the top-k sequences per query and merge them; returns
    (qid -> ordered concept ids, total discarded spans)."""
    predictions: dict[str, list[str]] = {}
    discarded = 0
    for record in decode_records:
        parsed = []
        for seq in record["sequences"][:k]:
            result = parse_sequence(seq["text"], vocab)
            discarded += result.discarded
            parsed.append(result.concept_ids)
        predictions[str(record["qid"])] = merge_topk(parsed)
    return predictions, discarded


def predictions_from_knn(knn_records, k: int):
    """Truncate each ranked hit list to its first k concepts."""
    return {
        str(record["qid"]): [str(hit["id"]) for hit in record["hits"][:k]]
        for record in knn_records
    }


def default_level_combos(queries) -> list[tuple[str, ...]]:
    """Single levels, then cumulative combinations in canonical level order."""
    present = [lvl for lvl in QUERY_LEVELS if any(q.level == lvl for q in queries)]
    combos: list[tuple[str, ...]] = [(lvl,) for lvl in present]
    for size in range(2, len(present) + 1):
        combos.append(tuple(present[:size]))
    return combos


@dataclass(frozen=True)
class ReportRow:
    levels: tuple[str, ...]
    k: int
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    seen_recall: float | None
    unseen_recall: float | None
    seen_gold: int
    unseen_gold: int
    discarded: int


@dataclass
class EvalReport:
    rows: list[ReportRow]

    def to_json(self) -> str:
        return json.dumps(
            {"rows": [asdict(row) | {"levels": list(row.levels)} for row in self.rows]},
            indent=2,
        )

    def format_table(self) -> str:
        """Aligned text table; percentages rounded to one decimal."""
        header = f"{'levels':<26} {'k':>3} {'P%':>6} {'R%':>6} {'F1%':>6} " \
                 f"{'tp':>5} {'fp':>5} {'fn':>5} {'seenR%':>7} {'unseenR%':>9}"
        lines = [header, "-" * len(header)]
        for row in self.rows:
            seen = f"{100 * row.seen_recall:.1f}" if row.seen_recall is not None else "n/a"
            unseen = f"{100 * row.unseen_recall:.1f}" if row.unseen_recall is not None else "n/a"
            lines.append(
                f"{'+'.join(row.levels):<26} {row.k:>3} {100 * row.precision:>6.1f} "
                f"{100 * row.recall:>6.1f} {100 * row.f1:>6.1f} {row.tp:>5} {row.fp:>5} "
                f"{row.fn:>5} {seen:>7} {unseen:>9}"
            )
        return "\n".join(lines)


def evaluate_run(
    outputs,
    queries,
    gold: dict[str, set[str]],
    vocab: SsidVocabulary | None,
    train_concepts=None,
    ks=(1, 5, 10),
    level_combos=None,
) -> EvalReport:
    """Score one system run at every k and level combination.

    ``outputs`` are decode records (``{"qid", "sequences"}``) or retrieval
    records (``{"qid", "hits"}``); the shape is detected from the first
    record. Decode records require ``vocab`` for parsing.
    """
    outputs = list(outputs)
    if not outputs:
        raise EvalError("no prediction records to evaluate")
    is_decode = "sequences" in outputs[0]
    if is_decode and vocab is None:
        raise EvalError("decoder outputs need an ssID vocabulary to parse")
    if level_combos is None:
        level_combos = default_level_combos(queries)
    rows = []
    for k in ks:
        if is_decode:
            predictions, discarded = predictions_from_decode(outputs, vocab, k)
        else:
            predictions, discarded = predictions_from_knn(outputs, k), 0
        for combo in level_combos:
            merged = aggregate_by_passage(predictions, queries, combo)
            counts = micro_prf(merged, gold)
            if train_concepts is not None:
                split = seen_unseen_recall(merged, gold, train_concepts)
            else:
                split = SplitRecall(None, None, 0, 0)
            rows.append(
                ReportRow(
                    levels=tuple(combo),
                    k=k,
                    precision=counts.precision,
                    recall=counts.recall,
                    f1=counts.f1,
                    tp=counts.tp,
                    fp=counts.fp,
                    fn=counts.fn,
                    seen_recall=split.seen_recall,
                    unseen_recall=split.unseen_recall,
                    seen_gold=split.seen_gold,
                    unseen_gold=split.unseen_gold,
                    discarded=discarded,
                )
            )
    return EvalReport(rows)
