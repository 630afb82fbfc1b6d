"""Constrained beam search over the ssID grammar under a pluggable scorer.

A scorer is a callable ``scorer(query, history, allowed) -> array of scores``
where ``query`` is an opaque per-query handle, ``history`` is the tuple of
tokens emitted so far, and ``allowed`` is the tuple of grammar-legal next
tokens. It must return one finite score per allowed token and be pure for a
fixed query. Sequence score is the sum of per-step scores (length
normalization is available behind a config flag, default off).

The built-in embedding-oracle scorer makes the pipeline runnable without any
neural model: extending a digit prefix is scored by the best cosine similarity
between the query vector and any concept reachable under that prefix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codec import EOS_TOKEN, SEP_TOKEN, SsidVocabulary, TrieNode, render_sequence
from .embeddings import EmbeddingMatrix, cosine_to_rows
from .errors import ConfigError, DecodeError


@dataclass
class ScoringHead:
    """Token-scoring parameters: embeddings ``e_t``, classifier ``W``/``b``."""

    token_embeddings: np.ndarray  # (T, H)
    weight: np.ndarray  # (T, H)
    bias: np.ndarray  # (T,)

    def __post_init__(self):
        self.token_embeddings = np.asarray(self.token_embeddings, dtype=np.float64)
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        t, h = self.token_embeddings.shape
        if self.weight.shape != (t, h):
            raise ConfigError(
                f"weight shape {self.weight.shape} != token embeddings shape {(t, h)}"
            )
        if self.bias.shape != (t,):
            raise ConfigError(f"bias shape {self.bias.shape} != ({t},)")
        for name, arr in (("token_embeddings", self.token_embeddings),
                          ("weight", self.weight), ("bias", self.bias)):
            if not np.isfinite(arr).all():
                raise ConfigError(f"{name} contains non-finite values")


def score_tokens(head: ScoringHead, h: np.ndarray, allowed_indices=None) -> np.ndarray:
    """Average of the dot-product feature and the linear-classifier feature.

    ``z_t = ((e_t . h) + (W_t . h + b_t)) / 2`` for each allowed token index.
    """
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (head.token_embeddings.shape[1],):
        raise ConfigError(
            f"hidden state is {h.shape}, head expects ({head.token_embeddings.shape[1]},)"
        )
    if allowed_indices is None:
        e = head.token_embeddings
        w = head.weight
        b = head.bias
    else:
        idx = np.asarray(allowed_indices, dtype=np.int64)
        e = head.token_embeddings[idx]
        w = head.weight[idx]
        b = head.bias[idx]
    return ((e @ h) + (w @ h + b)) / 2.0


def softmax(z: np.ndarray) -> np.ndarray:
    """Monotone normalization used only when probabilities are requested."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


@dataclass(frozen=True)
class BeamConfig:
    beam_width: int = 1
    max_ssids: int = 16
    max_tokens: int | None = None
    length_normalize: bool = False

    def __post_init__(self):
        if self.beam_width < 1:
            raise ConfigError(f"beam_width must be >= 1, got {self.beam_width}")
        if self.max_ssids < 1:
            raise ConfigError(f"max_ssids must be >= 1, got {self.max_ssids}")
        if self.max_tokens is not None and self.max_tokens < 1:
            raise ConfigError(f"max_tokens must be >= 1, got {self.max_tokens}")


@dataclass(frozen=True)
class DecodedSequence:
    tokens: tuple[str, ...]
    text: str
    score: float


@dataclass
class DecodeResult:
    sequences: list[DecodedSequence]

    def texts(self) -> list[str]:
        return [seq.text for seq in self.sequences]


@dataclass(frozen=True)
class _Beam:
    score: float
    tokens: tuple[str, ...]
    node: TrieNode | None  # None = at a boundary (start or right after ';')
    ssids_done: int


def _trie_depth(node: TrieNode) -> int:
    if not node.children:
        return 0
    return 1 + max(_trie_depth(child) for child in node.children.values())


def _tokens_to_text(tokens: tuple[str, ...]) -> str:
    ssids: list[str] = []
    current: list[str] = []
    for token in tokens:
        if token == EOS_TOKEN:
            break
        if token == SEP_TOKEN:
            ssids.append("-".join(current))
            current = []
        else:
            current.append(token)
    return render_sequence(ssids)


def constrained_beam_search(
    query, scorer, vocab: SsidVocabulary, cfg: BeamConfig
) -> DecodeResult:
    """Beam search where each step's candidates come only from the grammar.

    Candidate tokens are the trie children mid-ssID (plus ';' once the path is
    a complete ssID), and the trie roots plus EOS at a boundary. Every
    returned sequence is grammar-complete and EOS-terminated. Ties are broken
    by canonical token order so decoding is reproducible.
    """
    if len(vocab) == 0:
        raise DecodeError("vocabulary is empty")
    hard_cap = cfg.max_tokens
    if hard_cap is None:
        hard_cap = cfg.max_ssids * (_trie_depth(vocab.root) + 1) + 1

    def rank_key(tokens: tuple[str, ...]) -> tuple[int, ...]:
        return tuple(vocab.token_rank(t) for t in tokens)

    live = [_Beam(0.0, (), None, 0)]
    finished: list[_Beam] = []
    while live and len(finished) < cfg.beam_width:
        candidates: list[_Beam] = []
        for beam in live:
            if beam.node is None:
                allowed = vocab.allowed_after_sep(at_cap=beam.ssids_done >= cfg.max_ssids)
            else:
                allowed = vocab.allowed_in_ssid(beam.node)
            if len(beam.tokens) >= hard_cap:
                # safety cap: only an immediate EOS keeps the sequence valid
                if beam.node is not None or EOS_TOKEN not in allowed:
                    continue
                allowed = (EOS_TOKEN,)
            scores = np.asarray(scorer(query, beam.tokens, allowed), dtype=np.float64)
            if scores.shape != (len(allowed),):
                raise DecodeError(
                    f"scorer returned {scores.shape} scores for {len(allowed)} allowed tokens"
                )
            if not np.isfinite(scores).all():
                raise DecodeError("scorer returned a non-finite score")
            for token, step_score in zip(allowed, scores):
                total = beam.score + float(step_score)
                if token == EOS_TOKEN:
                    candidates.append(
                        _Beam(total, beam.tokens + (token,), None, beam.ssids_done)
                    )
                elif token == SEP_TOKEN:
                    candidates.append(
                        _Beam(total, beam.tokens + (token,), None, beam.ssids_done + 1)
                    )
                else:
                    node = beam.node or vocab.root
                    candidates.append(
                        _Beam(
                            total,
                            beam.tokens + (token,),
                            node.children[token],
                            beam.ssids_done,
                        )
                    )
        if not candidates:
            break
        candidates.sort(key=lambda b: (-b.score, rank_key(b.tokens)))
        live = []
        for beam in candidates[: cfg.beam_width]:
            if beam.tokens[-1] == EOS_TOKEN:
                finished.append(beam)
            else:
                live.append(beam)

    def final_score(beam: _Beam) -> float:
        if cfg.length_normalize and beam.tokens:
            return beam.score / len(beam.tokens)
        return beam.score

    finished.sort(key=lambda b: (-final_score(b), rank_key(b.tokens)))
    sequences = [
        DecodedSequence(b.tokens, _tokens_to_text(b.tokens), final_score(b))
        for b in finished[: cfg.beam_width]
    ]
    return DecodeResult(sequences)


# ---------------------------------------------------------------------------
# built-in scorers


def relevance_scorer(concept_scores: dict[str, float], vocab: SsidVocabulary,
                     eos_bias: float = 0.0, default_score: float | None = None):
    """Scorer driven by per-concept relevance values.

    Extending a digit prefix scores as the maximum relevance of any concept in
    the trie subtree under the extended prefix; ';' after a complete ssID
    scores that concept's relevance; EOS scores a fixed stop bias. Concepts
    absent from ``concept_scores`` take ``default_score`` when given,
    otherwise they are an error (every token score must stay finite).
    """
    resolved: dict[str, float] = {}
    for concept_id in vocab.concept_ids:
        if concept_id in concept_scores:
            value = float(concept_scores[concept_id])
            if not np.isfinite(value):
                raise DecodeError(f"non-finite relevance for concept {concept_id!r}")
            resolved[concept_id] = value
        elif default_score is not None:
            resolved[concept_id] = float(default_score)
        else:
            raise DecodeError(f"no relevance score for concept {concept_id!r}")

    node_best = np.full(len(vocab.nodes), -np.inf)

    def fill(node: TrieNode) -> float:
        best = -np.inf
        if node.concept_id is not None:
            best = resolved[node.concept_id]
        for child in node.children.values():
            best = max(best, fill(child))
        node_best[node.idx] = best
        return best

    fill(vocab.root)

    def scorer(query, history, allowed):
        # walk the digits of the ssID currently being emitted
        start = len(history)
        while start > 0 and history[start - 1] != SEP_TOKEN:
            start -= 1
        node = vocab.root
        for token in history[start:]:
            node = node.children[token]
        out = np.empty(len(allowed))
        for i, token in enumerate(allowed):
            if token == EOS_TOKEN:
                out[i] = eos_bias
            elif token == SEP_TOKEN:
                out[i] = resolved[node.concept_id]
            else:
                out[i] = node_best[node.children[token].idx]
        return out

    return scorer


def embedding_oracle_scorer(
    query_vec, vocab: SsidVocabulary, emb: EmbeddingMatrix, eos_bias: float = 0.0
):
    """Reference scorer: cosine similarity against concept vectors, maxed over
    trie subtrees. Stands in for a trained model so decoding runs end to end.
    """
    sims = cosine_to_rows(emb, query_vec)
    scores = {}
    for concept_id in vocab.concept_ids:
        if concept_id not in emb.index:
            raise DecodeError(f"no embedding for vocabulary concept {concept_id!r}")
        scores[concept_id] = float(sims[emb.index[concept_id]])
    return relevance_scorer(scores, vocab, eos_bias=eos_bias)


def teacher_scorer(target_tokens: tuple[str, ...], reward: float = 1.0):
    """Test-only scorer rewarding exactly one target token sequence.

    While the emitted history matches a prefix of the target, the next target
    token earns ``reward`` (EOS earns it once the target is exhausted);
    everything else scores zero.
    """
    target = tuple(target_tokens)

    def scorer(query, history, allowed):
        out = np.zeros(len(allowed))
        if history == target[: len(history)]:
            want = target[len(history)] if len(history) < len(target) else EOS_TOKEN
            for i, token in enumerate(allowed):
                if token == want:
                    out[i] = reward
        return out

    return scorer
