"""ssID token grammar: rendering, the prefix trie, and sequence parsing.

Decoder tokens are per-level digit strings plus the separator ``";"`` and an
end-of-sequence token; the ``"-"`` joining digits is rendering-only. A digit
path is accepted by the trie iff it is the complete ssID of some concept.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CodecError

SEP_TOKEN = ";"
EOS_TOKEN = "<eos>"


@dataclass(frozen=True)
class SsId:
    digits: tuple[int, ...]

    def __post_init__(self):
        if not self.digits or any(d < 0 for d in self.digits):
            raise CodecError(f"invalid ssID digits {self.digits!r}")

    def render(self) -> str:
        return "-".join(str(d) for d in self.digits)

    @classmethod
    def parse(cls, text: str) -> "SsId":
        parts = text.split("-")
        try:
            digits = tuple(int(p) for p in parts)
        except ValueError:
            raise CodecError(f"cannot parse ssID {text!r}") from None
        if any(p != str(d) for p, d in zip(parts, digits)):
            raise CodecError(f"cannot parse ssID {text!r}")
        return cls(digits)


@dataclass
class TrieNode:
    idx: int
    children: dict[str, "TrieNode"] = field(default_factory=dict)
    concept_id: str | None = None
    # digit tokens sorted numerically, cached for the decoder's allowed-next sets
    sorted_children: tuple[str, ...] = ()


class SsidVocabulary:
    """Prefix trie over the valid ssIDs plus the token inventory."""

    def __init__(self, root: TrieNode, nodes: list[TrieNode], by_ssid: dict[str, str],
                 ssid_of: dict[str, SsId], digit_tokens: tuple[str, ...]):
        self.root = root
        self.nodes = nodes
        self.by_ssid = by_ssid
        self.ssid_of = ssid_of
        self.digit_tokens = digit_tokens
        self.concept_ids = frozenset(by_ssid.values())
        self._token_rank = {tok: i for i, tok in enumerate(digit_tokens)}
        self._token_rank[SEP_TOKEN] = len(digit_tokens)
        self._token_rank[EOS_TOKEN] = len(digit_tokens) + 1

    def __len__(self) -> int:
        return len(self.by_ssid)

    def token_rank(self, token: str) -> int:
        """Canonical token order: digits numerically, then ';', then EOS."""
        return self._token_rank[token]

    def node_for(self, digits) -> TrieNode | None:
        node = self.root
        for d in digits:
            node = node.children.get(str(d))
            if node is None:
                return None
        return node

    def accepts(self, digits) -> bool:
        node = self.node_for(digits)
        return node is not None and node.concept_id is not None

    def allowed_after_sep(self, at_cap: bool = False) -> tuple[str, ...]:
        """Tokens legal at a sequence boundary (start of decode or after ';')."""
        if at_cap:
            return (EOS_TOKEN,)
        return self.root.sorted_children + (EOS_TOKEN,)

    def allowed_in_ssid(self, node: TrieNode) -> tuple[str, ...]:
        """Tokens legal while inside an ssID at ``node``."""
        if node.concept_id is not None:
            return node.sorted_children + (SEP_TOKEN,)
        return node.sorted_children


def build_vocabulary(ssid_map) -> SsidVocabulary:
    """Build the trie from a concept-id -> ssID map (SsId or rendered string)."""
    ssid_of: dict[str, SsId] = {}
    for concept_id, value in ssid_map.items():
        ssid_of[concept_id] = value if isinstance(value, SsId) else SsId.parse(str(value))

    root = TrieNode(idx=0)
    nodes = [root]
    by_ssid: dict[str, str] = {}
    max_digit = -1
    for concept_id in ssid_of:
        ssid = ssid_of[concept_id]
        rendered = ssid.render()
        if rendered in by_ssid:
            raise CodecError(
                f"ssID {rendered!r} assigned to both {by_ssid[rendered]!r} and {concept_id!r}"
            )
        by_ssid[rendered] = concept_id
        node = root
        for d in ssid.digits:
            max_digit = max(max_digit, d)
            token = str(d)
            child = node.children.get(token)
            if child is None:
                child = TrieNode(idx=len(nodes))
                nodes.append(child)
                node.children[token] = child
            node = child
        node.concept_id = concept_id

    for node in nodes:
        node.sorted_children = tuple(
            sorted(node.children.keys(), key=int)
        )
    digit_tokens = tuple(str(d) for d in range(max_digit + 1))
    return SsidVocabulary(root, nodes, by_ssid, ssid_of, digit_tokens)


def render_sequence(ssids) -> str:
    """Render ssIDs the way the decoder emits them: ``"6-2-8-0-5; 9-6-6-9-5;"``."""
    parts = []
    for item in ssids:
        rendered = item.render() if isinstance(item, SsId) else str(item)
        parts.append(rendered + SEP_TOKEN)
    return " ".join(parts)


@dataclass
class ParseResult:
    concept_ids: list[str]
    discarded: int
    duplicates: int


def parse_sequence(text: str, vocab: SsidVocabulary) -> ParseResult:
    """Split on ';', keep spans that exactly match a valid ssID, dedup in order.

    Unparseable spans are discarded silently (their count is reported for
    diagnostics), so arbitrary text is tolerated.
    """
    seen = set()
    ordered: list[str] = []
    discarded = 0
    duplicates = 0
    for span in text.split(SEP_TOKEN):
        span = span.strip()
        if not span:
            continue
        concept_id = vocab.by_ssid.get(span)
        if concept_id is None:
            discarded += 1
        elif concept_id in seen:
            duplicates += 1
        else:
            seen.add(concept_id)
            ordered.append(concept_id)
    return ParseResult(ordered, discarded, duplicates)


def merge_topk(parsed_sets) -> list[str]:
    """Union across rank-ordered prediction lists, preserving first-seen order."""
    seen = set()
    merged: list[str] = []
    for ids in parsed_sets:
        for concept_id in ids:
            if concept_id not in seen:
                seen.add(concept_id)
                merged.append(concept_id)
    return merged
