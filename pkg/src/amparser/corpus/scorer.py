"""A count-based scorer that turns sentences into score tables.

Every score is a smoothed log-probability estimated from treebank counts.
Word-level estimates are interpolated with their POS-level back-off, so
frequent words get their own behaviour and unseen words still get a full,
finite candidate set.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..amdep import AmDepTree, Token
from ..amtypes import IGNORE, EdgeOp
from ..asgraph import AsGraph, parse_asgraph, render_asgraph
from ..decode.scoretable import NEG_INF, Candidate, ScoreTable

BOTTOM_KEY = "_|_"
ROOT_POS = "ROOT"
MAX_DISTANCE = 5


def distance_bucket(head: int, dep: int) -> int:
    if head == 0:
        return 0
    d = dep - head
    return max(-MAX_DISTANCE, min(MAX_DISTANCE, d))


@dataclass
class ScorerConfig:
    smoothing: float = 0.1  # the add-lambda constant, > 0
    # weight of the POS back-off when interpolating with word-level counts
    backoff: float = 1.0


def _interpolate(counts: Counter, total: int, backoff: Dict[str, float], key, weight: float) -> float:
    return (counts.get(key, 0) + weight * backoff.get(key, 0.0)) / (total + weight)


@dataclass
class CountScorer:
    config: ScorerConfig
    supertags: List[str]  # rendered supertags; BOTTOM_KEY for the bottom constant
    ops: List[str]
    st_form: Dict[str, Counter] = field(default_factory=dict)
    st_pos: Dict[str, Counter] = field(default_factory=dict)
    lex_form: Dict[str, Counter] = field(default_factory=dict)
    edge_pos: Dict[str, List[int]] = field(default_factory=dict)  # feature -> [positive, total]
    edge_lex: Dict[str, List[int]] = field(default_factory=dict)
    label_pos: Dict[str, Counter] = field(default_factory=dict)
    label_lex: Dict[str, Counter] = field(default_factory=dict)

    # --- estimates ---

    def _st_pos_dist(self, pos: str) -> Dict[str, float]:
        lam = self.config.smoothing
        c = self.st_pos.get(pos, Counter())
        total = sum(c.values())
        denom = total + lam * len(self.supertags)
        return {st: (c.get(st, 0) + lam) / denom for st in self.supertags}

    def supertag_scores(self, form: str, pos: str) -> Dict[str, float]:
        back = self._st_pos_dist(pos)
        c = self.st_form.get(form.lower(), Counter())
        total = sum(c.values())
        return {st: math.log(_interpolate(c, total, back, st, self.config.backoff)) for st in self.supertags}

    def lexlabel(self, form: str) -> Optional[str]:
        c = self.lex_form.get(form.lower())
        if not c:
            return None
        return min(c, key=lambda lab: (-c[lab], lab))

    def edge_score(self, tokens: Sequence[Token], head: int, dep: int) -> float:
        lam = self.config.smoothing
        key_pos, key_lex = _edge_keys(tokens, head, dep)
        pos_pos, pos_total = self.edge_pos.get(key_pos, (0, 0))
        p_pos = (pos_pos + lam) / (pos_total + 2 * lam)
        lex_pos, lex_total = self.edge_lex.get(key_lex, (0, 0))
        return math.log((lex_pos + self.config.backoff * p_pos) / (lex_total + self.config.backoff))

    def label_scores(self, tokens: Sequence[Token], head: int, dep: int) -> Dict[str, float]:
        lam = self.config.smoothing
        key_pos, key_lex = _label_keys(tokens, head, dep)
        c = self.label_pos.get(key_pos, Counter())
        denom = sum(c.values()) + lam * len(self.ops)
        back = {op: (c.get(op, 0) + lam) / denom for op in self.ops}
        cl = self.label_lex.get(key_lex, Counter())
        total = sum(cl.values())
        return {op: math.log(_interpolate(cl, total, back, op, self.config.backoff)) for op in self.ops}

    @property
    def label_floor(self) -> float:
        """Log of the add-lambda floor for an operation never seen in training."""
        lam = self.config.smoothing
        biggest = max((sum(c.values()) for c in self.label_pos.values()), default=0)
        return math.log(lam / (biggest + lam * (len(self.ops) + 1)))

    # --- persistence ---

    def to_json(self) -> dict:
        return {
            "config": vars(self.config),
            "supertags": self.supertags,
            "ops": self.ops,
            "st_form": self.st_form,
            "st_pos": self.st_pos,
            "lex_form": self.lex_form,
            "edge_pos": self.edge_pos,
            "edge_lex": self.edge_lex,
            "label_pos": self.label_pos,
            "label_lex": self.label_lex,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=0)

    @classmethod
    def from_json(cls, doc: dict) -> "CountScorer":
        counters = ("st_form", "st_pos", "lex_form", "label_pos", "label_lex")
        kwargs = {name: {k: Counter(v) for k, v in doc[name].items()} for name in counters}
        return cls(
            ScorerConfig(**doc["config"]),
            list(doc["supertags"]),
            list(doc["ops"]),
            edge_pos={k: list(v) for k, v in doc["edge_pos"].items()},
            edge_lex={k: list(v) for k, v in doc["edge_lex"].items()},
            **kwargs,
        )

    @classmethod
    def loads(cls, text: str) -> "CountScorer":
        return cls.from_json(json.loads(text))


def _pos(tokens: Sequence[Token], i: int) -> str:
    return ROOT_POS if i == 0 else tokens[i - 1].pos


def _form(tokens: Sequence[Token], i: int) -> str:
    return ROOT_POS if i == 0 else tokens[i - 1].form.lower()


def _edge_keys(tokens, head, dep) -> Tuple[str, str]:
    b = distance_bucket(head, dep)
    return (
        f"{_pos(tokens, head)} {_pos(tokens, dep)} {b}",
        f"{_form(tokens, head)} {_form(tokens, dep)} {b}",
    )


def _label_keys(tokens, head, dep) -> Tuple[str, str]:
    direction = "R" if dep > head else "L"
    return (
        f"{_pos(tokens, head)} {_pos(tokens, dep)} {direction}",
        f"{_form(tokens, head)} {_form(tokens, dep)} {direction}",
    )


def train_count_scorer(trees: Sequence[AmDepTree], config: Optional[ScorerConfig] = None) -> CountScorer:
    """Estimate all counts from a (delexicalized) treebank in one pass."""
    config = config or ScorerConfig()
    if config.smoothing <= 0:
        raise ValueError("smoothing must be positive")
    st_form, st_pos, lex_form = defaultdict(Counter), defaultdict(Counter), defaultdict(Counter)
    edge_pos: Dict[str, List[int]] = defaultdict(lambda: [0, 0])
    edge_lex: Dict[str, List[int]] = defaultdict(lambda: [0, 0])
    label_pos, label_lex = defaultdict(Counter), defaultdict(Counter)
    inventory = {BOTTOM_KEY}
    ops = {str(IGNORE)}
    for t in trees:
        n = len(t)
        for i in range(1, n + 1):
            tok = t.tokens[i - 1]
            g = t.supertags[i - 1]
            key = BOTTOM_KEY if g is None else render_asgraph(g)
            inventory.add(key)
            st_form[tok.form.lower()][key] += 1
            st_pos[tok.pos][key] += 1
            if t.lexlabels[i - 1] is not None:
                lex_form[tok.form.lower()][t.lexlabels[i - 1]] += 1
        for d in range(1, n + 1):
            for h in range(0, n + 1):
                if h == d:
                    continue
                positive = int(t.heads[d - 1] == h)
                kp, kl = _edge_keys(t.tokens, h, d)
                edge_pos[kp][0] += positive
                edge_pos[kp][1] += 1
                edge_lex[kl][0] += positive
                edge_lex[kl][1] += 1
            h, op = t.heads[d - 1], t.labels[d - 1]
            if h != 0:
                kp, kl = _label_keys(t.tokens, h, d)
                label_pos[kp][str(op)] += 1
                label_lex[kl][str(op)] += 1
                ops.add(str(op))
    return CountScorer(
        config,
        sorted(inventory),
        sorted(ops),
        dict(st_form),
        dict(st_pos),
        dict(lex_form),
        dict(edge_pos),
        dict(edge_lex),
        dict(label_pos),
        dict(label_lex),
    )


_PARSED: Dict[str, AsGraph] = {}


def _graph(key: str) -> Optional[AsGraph]:
    if key == BOTTOM_KEY:
        return None
    g = _PARSED.get(key)
    if g is None:
        g = _PARSED[key] = parse_asgraph(key)
    return g


def score_sentence(scorer: CountScorer, tokens: Sequence[str], pos: Optional[Sequence[str]] = None, k: int = 4) -> ScoreTable:
    """A score table with the k best supertags per token plus the bottom
    candidate, all pairwise edge scores and the label scores of every seen
    operation."""
    pos = list(pos) if pos is not None else ["_"] * len(tokens)
    toks = [Token(w, p) for w, p in zip(tokens, pos)]
    n = len(toks)
    cands = []
    for tok in toks:
        scores = scorer.supertag_scores(tok.form, tok.pos)
        lexlabel = scorer.lexlabel(tok.form)
        ranked = sorted((st for st in scores if st != BOTTOM_KEY), key=lambda st: (-scores[st], st))[:k]
        row = [Candidate(_graph(st), scores[st], lexlabel) for st in ranked]
        row.append(Candidate(None, scores[BOTTOM_KEY]))
        cands.append(row)
    edges = np.full((n + 1, n + 1), NEG_INF)
    labels: Dict[Tuple[int, int], Dict[EdgeOp, float]] = {}
    for d in range(1, n + 1):
        for h in range(0, n + 1):
            if h == d:
                continue
            edges[h, d] = scorer.edge_score(toks, h, d)
            if h:
                labels[(h, d)] = {EdgeOp.parse(op): s for op, s in scorer.label_scores(toks, h, d).items()}
    return ScoreTable(toks, cands, edges, labels, scorer.label_floor)
