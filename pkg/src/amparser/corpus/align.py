"""Aligner-lite: a greedy node-to-token aligner.

Two kinds of actions compete in a best-first loop.  Action 1 aligns a token
to a node whose concept matches the word; action 2 extends an existing
alignment to an adjacent unaligned node.  Both are scored by configurable
weights; an action is only allowed if the extended fragment still has a
single root.  Nodes left over at the end are attached to a neighbouring
fragment where possible.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from ..asgraph import AsGraph
from .policy import BlobPolicy

# (suffix, replacement) pairs tried when matching a word against a concept stem
SUFFIX_RULES = (
    ("ies", "y"),
    ("es", ""),
    ("s", ""),
    ("ed", ""),
    ("ed", "e"),
    ("d", ""),
    ("ing", ""),
    ("ing", "e"),
    ("ly", ""),
    ("er", ""),
    ("er", "e"),
    ("or", "e"),
)


@dataclass
class ExtendRule:
    """Weight for extending along an edge `label` in `direction` ('out' if the
    new node is the edge target) to a node with concept `target` ('*' matches
    anything).  `suffixes` restricts the rule to words with these endings."""

    label: str
    direction: str
    target: str
    weight: float
    suffixes: Tuple[str, ...] = ()

    def matches(self, label: str, direction: str, target: Optional[str], word: str) -> bool:
        if self.label not in ("*", label) or self.direction not in ("*", direction):
            return False
        if self.target not in ("*", target):
            return False
        return not self.suffixes or word.lower().endswith(tuple(self.suffixes))


def _default_extend_rules() -> List[ExtendRule]:
    return [
        # agentive nouns: "writer" covers write-01 and its ARG0 person
        ExtendRule("ARG0", "out", "person", 5.0, ("er", "or", "ist")),
        ExtendRule("ARG0", "out", "thing", 4.0, ("er", "or")),
        ExtendRule("ARG1", "out", "thing", 3.0, ("ion", "ment")),
        ExtendRule("*", "*", "*", 1.0),
    ]


@dataclass
class AlignerWeights:
    exact: float = 10.0
    lowercase: float = 9.0
    rule: float = 8.0
    lemma: float = 6.0
    neighborhood_bonus: float = 0.5
    conflict_penalty: float = 0.25
    neighborhood_window: int = 2
    # word -> concept stems it may align to, for forms no suffix rule can reach
    rules: Dict[str, List[str]] = field(
        default_factory=lambda: {
            "has": ["have"],
            "is": ["be"],
            "saw": ["see"],
            "ate": ["eat"],
            "went": ["go"],
            "not": ["-"],
            "n't": ["-"],
            "no": ["-"],
        }
    )
    extend: List[ExtendRule] = field(default_factory=_default_extend_rules)

    @classmethod
    def from_json(cls, doc: dict) -> "AlignerWeights":
        doc = dict(doc)
        if "extend" in doc:
            doc["extend"] = [
                ExtendRule(r["label"], r["direction"], r["target"], float(r["weight"]), tuple(r.get("suffixes", ())))
                for r in doc["extend"]
            ]
        return cls(**doc)

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["extend"] = [dict(asdict(r), suffixes=list(r.suffixes)) for r in self.extend]
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


@dataclass
class Alignment:
    node_token: Dict[int, int]  # AMR node -> token position (1-based)
    lexical: Dict[int, int]  # token position -> its lexical node
    unaligned: List[int] = field(default_factory=list)

    def fragment(self, token: int) -> Set[int]:
        return {n for n, t in self.node_token.items() if t == token}

    def fragments(self) -> Dict[int, Set[int]]:
        out: Dict[int, Set[int]] = {}
        for n, t in self.node_token.items():
            out.setdefault(t, set()).add(n)
        return out


def concept_stem(label: Optional[str]) -> str:
    if label is None:
        return ""
    if len(label) >= 2 and label[0] == '"' and label[-1] == '"':
        return label[1:-1]
    return re.sub(r"-\d+$", "", label)


def match_score(word: str, label: Optional[str], weights: AlignerWeights) -> float:
    stem = concept_stem(label)
    if not stem:
        return 0.0
    if word == stem:
        return weights.exact
    low = word.lower()
    if low == stem.lower():
        return weights.lowercase
    if stem in weights.rules.get(low, ()):
        return weights.rule
    for suffix, repl in SUFFIX_RULES:
        if low.endswith(suffix) and len(low) > len(suffix) + 1 and low[: -len(suffix)] + repl == stem:
            return weights.lemma
    return 0.0


def attachment_points(g: AsGraph, fragment: Set[int], policy: BlobPolicy) -> Set[int]:
    """Nodes of `fragment` that other fragments must attach to: the graph root,
    targets of requests from outside, and heads of modifiers outside."""
    points = {g.root} & fragment
    for s, t, lab in g.edges:
        if s in fragment and t in fragment:
            continue
        if t in fragment and not policy.owned_by_target(lab):
            points.add(t)
        elif s in fragment and policy.owned_by_target(lab):
            points.add(s)
    return points


def align(
    g: AsGraph,
    tokens: Sequence[str],
    fixed: Optional[Dict[int, int]] = None,
    weights: Optional[AlignerWeights] = None,
    policy: Optional[BlobPolicy] = None,
) -> Alignment:
    """Align AMR nodes to 1-based token positions.  `fixed` pre-aligns tokens
    to nodes (from preprocessing records) and takes precedence."""
    weights = weights or AlignerWeights()
    policy = policy or BlobPolicy()
    node_token: Dict[int, int] = {}
    lexical: Dict[int, int] = {}
    for tok, node in sorted((fixed or {}).items()):
        if node in g.labels and node not in node_token:
            node_token[node] = tok
            lexical[tok] = node
    nodes = sorted(g.labels)
    neighbors: Dict[int, List[Tuple[int, str, str]]] = {n: [] for n in nodes}
    for s, t, lab in sorted(g.edges):
        neighbors[s].append((t, lab, "out"))
        neighbors[t].append((s, lab, "in"))

    def single_root(token: int, extra: int) -> bool:
        frag = {n for n, t in node_token.items() if t == token} | {extra}
        return len(attachment_points(g, frag, policy)) <= 1

    while True:
        candidates = []  # (base score, action, token, node)
        for t in range(1, len(tokens) + 1):
            if t in lexical:
                continue
            for v in nodes:
                if v in node_token:
                    continue
                s = match_score(tokens[t - 1], g.labels[v], weights)
                if s > 0:
                    candidates.append((s, 1, t, v))
        for u in nodes:
            t = node_token.get(u)
            if t is None:
                continue
            for v, lab, direction in neighbors[u]:
                if v in node_token:
                    continue
                s = max(
                    (r.weight for r in weights.extend if r.matches(lab, direction, g.labels[v], tokens[t - 1])),
                    default=0.0,
                )
                if s > 0 and single_root(t, v):
                    candidates.append((s, 2, t, v))
        if not candidates:
            break
        best = None
        for base, action, t, v in candidates:
            score = base
            near = any(
                node_token.get(w) is not None
                and node_token[w] != t
                and abs(node_token[w] - t) <= weights.neighborhood_window
                for w, _, _ in neighbors[v]
            )
            if near:
                score += weights.neighborhood_bonus
            rivals = sum(1 for b, _, t2, v2 in candidates if v2 == v and t2 != t and b >= base)
            score -= weights.conflict_penalty * rivals
            key = (-score, action, t, v)
            if best is None or key < best[0]:
                best = (key, action, t, v)
        _, action, t, v = best
        node_token[v] = t
        if action == 1:
            lexical[t] = v

    # leftovers go to a neighbouring fragment, nearest token first
    changed = True
    while changed:
        changed = False
        for v in nodes:
            if v in node_token:
                continue
            options = sorted({node_token[w] for w, _, _ in neighbors[v] if w in node_token})
            for t in options:
                if single_root(t, v):
                    node_token[v] = t
                    changed = True
                    break
    unaligned = [v for v in nodes if v not in node_token]
    return Alignment(node_token, lexical, unaligned)
