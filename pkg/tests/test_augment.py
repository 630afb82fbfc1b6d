import numpy as np
import pytest

from macoir import (
    ClaimRecord,
    EmbeddingMatrix,
    EvalError,
    SsId,
    VectorLookupError,
    emit_training_pairs,
    match_claims,
)
from macoir.embeddings import cosine


def _emb(rows: dict):
    return EmbeddingMatrix(list(rows), np.array(list(rows.values()), dtype=np.float32))


def test_identical_vectors_pair_at_similarity_one():
    claims = [ClaimRecord("P1", "some claim", ("hit excerpt",))]
    gold = {"P1": {"C1"}}
    excerpt_emb = _emb({"hit excerpt": [1.0, 2.0, 3.0]})
    concept_emb = _emb({"C1": [1.0, 2.0, 3.0]})
    pairs = match_claims(claims, gold, excerpt_emb, concept_emb)
    assert len(pairs) == 1
    assert pairs[0].concept_id == "C1"
    assert pairs[0].excerpt == "hit excerpt"
    assert pairs[0].similarity == pytest.approx(1.0)


def test_below_threshold_emits_nothing():
    # cosine = 0.49 < 0.5 for every excerpt-concept pair
    angle = np.arccos(0.49)
    claims = [ClaimRecord("P1", "claim", ("e1",))]
    gold = {"P1": {"C1"}}
    excerpt_emb = _emb({"e1": [1.0, 0.0]})
    concept_emb = _emb({"C1": [np.cos(angle), np.sin(angle)]})
    sim = cosine(excerpt_emb.vector("e1"), concept_emb.vector("C1"))
    assert sim < 0.5
    assert match_claims(claims, gold, excerpt_emb, concept_emb) == []


def test_boundary_exactly_half_included():
    # |u| = 1, |v| = 2 and u.v = 1 are all exact in binary floating point
    u = [1.0, 0.0, 0.0, 0.0]
    v = [1.0, 1.0, 1.0, 1.0]
    assert cosine(u, v) == 0.5
    claims = [ClaimRecord("P1", "claim", ("e1",))]
    pairs = match_claims(claims, {"P1": {"C1"}}, _emb({"e1": u}), _emb({"C1": v}))
    assert len(pairs) == 1
    assert pairs[0].similarity == 0.5


def test_boundary_just_below_excluded():
    u = [1.0, 0.0, 0.0, 0.0]
    c = 0.49990 * np.sqrt(3.0 / (1.0 - 0.49990**2))
    v = [c, 1.0, 1.0, 1.0]
    sim = cosine(u, v)
    assert sim == pytest.approx(0.4999, abs=1e-4)
    assert sim < 0.5
    pairs = match_claims(
        [ClaimRecord("P1", "claim", ("e1",))], {"P1": {"C1"}}, _emb({"e1": u}), _emb({"C1": v})
    )
    assert pairs == []


def _fixture_3x5():
    """3 claims x 5 gold concepts with hand-placed vectors."""
    rng = np.random.default_rng(30)
    concepts = {f"C{i}": rng.normal(size=6) for i in range(5)}
    excerpts = {}
    claims = []
    for ci in range(3):
        spans = []
        for e in range(3):
            name = f"claim{ci} excerpt{e}"
            if e == 0:
                vec = concepts[f"C{(ci + e) % 5}"] + rng.normal(size=6) * 0.05
            else:
                vec = rng.normal(size=6) * 2
            excerpts[name] = vec
            spans.append(name)
        claims.append(ClaimRecord("P1", f"claim {ci}", tuple(spans)))
    gold = {"P1": set(concepts)}
    return claims, gold, _emb(excerpts), _emb(concepts)


def test_matches_exhaustive_double_loop_oracle():
    claims, gold, excerpt_emb, concept_emb, = _fixture_3x5()
    pairs = match_claims(claims, gold, excerpt_emb, concept_emb, threshold=0.5)

    oracle = set()
    for claim in claims:
        for concept_id in gold["P1"]:
            best = max(
                cosine(excerpt_emb.vector(e), concept_emb.vector(concept_id))
                for e in claim.excerpts
            )
            if best >= 0.5:
                oracle.add((claim.claim, concept_id))
    assert {(p.claim, p.concept_id) for p in pairs} == oracle
    assert all(p.similarity >= 0.5 for p in pairs)


def test_pairs_never_cross_passages():
    claims = [
        ClaimRecord("P1", "claim one", ("e1",)),
        ClaimRecord("P2", "claim two", ("e1",)),
    ]
    gold = {"P1": {"C1"}, "P2": {"C2"}}
    excerpt_emb = _emb({"e1": [1.0, 0.0]})
    concept_emb = _emb({"C1": [1.0, 0.0], "C2": [1.0, 0.0]})
    pairs = match_claims(claims, gold, excerpt_emb, concept_emb)
    assert {(p.claim, p.concept_id) for p in pairs} == {
        ("claim one", "C1"),
        ("claim two", "C2"),
    }


def test_unknown_passage_and_missing_vectors():
    claims = [ClaimRecord("P9", "claim", ("e1",))]
    with pytest.raises(EvalError, match="P9"):
        match_claims(claims, {"P1": set()}, _emb({"e1": [1.0]}), _emb({"C1": [1.0]}))
    claims = [ClaimRecord("P1", "claim", ("missing",))]
    with pytest.raises(VectorLookupError, match="missing"):
        match_claims(claims, {"P1": {"C1"}}, _emb({"e1": [1.0]}), _emb({"C1": [1.0]}))


def test_empty_excerpts_yield_no_pairs():
    claims = [ClaimRecord("P1", "claim", ())]
    pairs = match_claims(claims, {"P1": {"C1"}}, _emb({"e": [1.0]}), _emb({"C1": [1.0]}))
    assert pairs == []


# ---------------------------------------------------------------------------
# emit_training_pairs


def _pair(claim, concept_id, passage_id="P1"):
    from macoir.augment import ClaimConceptPair

    return ClaimConceptPair(passage_id, claim, concept_id, "e", 0.9)


def test_emit_groups_and_orders_by_concept_id():
    ssid_map = {"A": SsId((0, 1)), "B": SsId((2,))}
    records = emit_training_pairs([_pair("c", "B"), _pair("c", "A")], ssid_map)
    assert records == [
        {"passage_id": "P1", "claim": "c", "ssids": "0-1; 2;", "concepts": ["A", "B"]}
    ]


def test_emit_accepts_rendered_strings():
    records = emit_training_pairs([_pair("c", "A")], {"A": "3-4"})
    assert records[0]["ssids"] == "3-4;"


def test_emit_omits_claims_without_pairs():
    assert emit_training_pairs([], {"A": "0"}) == []


def test_emit_seven_concepts_single_claim():
    ssid_map = {f"C{i}": SsId((i,)) for i in range(7)}
    pairs = [_pair("one claim", f"C{i}") for i in range(7)]
    records = emit_training_pairs(pairs, ssid_map)
    assert len(records) == 1
    assert records[0]["ssids"].count(";") == 7
    assert records[0]["concepts"] == [f"C{i}" for i in range(7)]


def test_emit_unmapped_concept_rejected():
    with pytest.raises(EvalError, match="no ssID"):
        emit_training_pairs([_pair("c", "ZZZ")], {"A": "0"})
