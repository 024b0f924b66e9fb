"""Factored score tables: supertag scores per token plus edge and label scores.

Scores live in the log domain.  ``-inf`` marks a forbidden choice (a
supertag, edge or label that no decoder may use).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..amdep import AmDepTree, Token
from ..amtypes import BOTTOM, EMPTY, APP, MOD, EdgeOp, TypeLike
from ..asgraph import AsGraph, parse_asgraph, render_asgraph, type_of

NEG_INF = float("-inf")


class ScoreTableError(ValueError):
    pass


@dataclass(frozen=True)
class Candidate:
    graph: Optional[AsGraph]  # None is the bottom constant
    score: float
    lexlabel: Optional[str] = None

    @property
    def type(self) -> TypeLike:
        return BOTTOM if self.graph is None else type_of(self.graph)

    @property
    def is_bottom(self) -> bool:
        return self.graph is None


@dataclass
class ScoreTable:
    tokens: List[Token]
    supertags: List[List[Candidate]]
    edges: np.ndarray  # (n+1, n+1); row 0 is the virtual root
    labels: Dict[Tuple[int, int], Dict[EdgeOp, float]] = field(default_factory=dict)
    label_default: float = 0.0

    def __post_init__(self):
        n = len(self.tokens)
        if n < 1:
            raise ScoreTableError("score table needs at least one token")
        if len(self.supertags) != n:
            raise ScoreTableError("one candidate list per token is required")
        self.edges = np.asarray(self.edges, dtype=float)
        if self.edges.shape != (n + 1, n + 1):
            raise ScoreTableError(f"edge matrix must be {(n + 1, n + 1)}, got {self.edges.shape}")
        for i, cands in enumerate(self.supertags, start=1):
            if not cands:
                raise ScoreTableError(f"token {i} has an empty candidate list")
            for c in cands:
                if math.isnan(c.score) or c.score == math.inf:
                    raise ScoreTableError(f"token {i} has a non-finite supertag score")

    @property
    def n(self) -> int:
        return len(self.tokens)

    # --- lookups ---

    def edge_score(self, head: int, dep: int) -> float:
        return float(self.edges[head, dep])

    def label_score(self, op: EdgeOp, head: int, dep: int) -> float:
        return self.labels.get((head, dep), {}).get(op, self.label_default)

    def arc_score(self, op: EdgeOp, head: int, dep: int) -> float:
        return self.edge_score(head, dep) + self.label_score(op, head, dep)

    def kbest(self, i: int, k: Optional[int]) -> List[Candidate]:
        """The k highest-scoring non-bottom candidates of token i plus its bottom
        candidate, if any.  Forbidden (-inf) candidates are dropped."""
        cands = [c for c in self.supertags[i - 1] if c.score > NEG_INF]
        proper = [c for c in cands if not c.is_bottom]
        proper.sort(key=lambda c: -c.score)  # stable: list order breaks ties
        if k is not None:
            proper = proper[:k]
        bottoms = [c for c in cands if c.is_bottom][:1]
        return proper + bottoms

    def bottom_score(self, i: int) -> float:
        for c in self.supertags[i - 1]:
            if c.is_bottom:
                return c.score
        return NEG_INF

    @cached_property
    def listed_ops(self) -> List[EdgeOp]:
        ops = set()
        for table in self.labels.values():
            ops.update(table)
        return sorted(ops)

    def label_matrix(self, op: EdgeOp) -> np.ndarray:
        cache = self.__dict__.setdefault("_label_cache", {})
        mat = cache.get(op)
        if mat is None:
            mat = np.full((self.n + 1, self.n + 1), self.label_default, dtype=float)
            for (h, d), table in self.labels.items():
                if op in table:
                    mat[h, d] = table[op]
            cache[op] = mat
        return mat

    def entries(self, k: Optional[int] = None) -> set:
        """All (source, annotation) entries that can occur in any derived type."""
        out = set()
        stack = [c.type for i in range(1, self.n + 1) for c in self.kbest(i, k) if not c.is_bottom]
        seen = set()
        while stack:
            t = stack.pop()
            if t in seen:
                continue
            seen.add(t)
            for name, ann in t.items():
                out.add((name, ann))
                stack.append(ann)
        return out

    def plausible_ops(self, dep_type: TypeLike, entries: set) -> List[EdgeOp]:
        """Operations that could ever attach a dependent of `dep_type`."""
        if dep_type is BOTTOM:
            return []
        ops = [APP(name) for name, ann in sorted(entries) if ann is dep_type]
        ops += [MOD(name) for name, ann in dep_type.items() if ann is EMPTY]
        return ops

    # --- tree scores ---

    def tree_score(self, tree: AmDepTree) -> float:
        """Supertag scores plus E + L over all edges (IGNORE included, root edge excluded)."""
        total = 0.0
        for i in range(1, self.n + 1):
            g = tree.supertag(i)
            total += self._supertag_score(i, g, tree.lexlabels[i - 1])
        for h, d, op in tree.edges():
            total += self.arc_score(op, h, d)
        return total

    def _supertag_score(self, i: int, g: Optional[AsGraph], lexlabel=None) -> float:
        for c in self.supertags[i - 1]:
            if c.graph is g:
                return c.score
        for c in self.supertags[i - 1]:
            if (c.graph is None) == (g is None) and (
                g is None or render_asgraph(c.graph) == render_asgraph(g)
            ):
                return c.score
        if g is None:
            return NEG_INF
        raise ScoreTableError(f"supertag of token {i} is not among its candidates")

    # --- JSON ---

    def to_json(self) -> dict:
        n = self.n
        edges = [
            [i, k, _num(self.edges[i, k])]
            for i in range(n + 1)
            for k in range(1, n + 1)
            if i != k
        ]
        labels = [
            [h, d, str(op), _num(score)]
            for (h, d), table in sorted(self.labels.items())
            for op, score in sorted(table.items())
        ]
        sts = []
        for cands in self.supertags:
            row = []
            for c in cands:
                entry = {"graph": "_|_" if c.graph is None else render_asgraph(c.graph), "score": _num(c.score)}
                if c.lexlabel is not None:
                    entry["lexlabel"] = c.lexlabel
                row.append(entry)
            sts.append(row)
        return {
            "tokens": [{"form": t.form, "pos": t.pos} for t in self.tokens],
            "supertags": sts,
            "edges": edges,
            "labels": labels,
            "label_default": _num(self.label_default),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, doc: dict) -> "ScoreTable":
        try:
            tokens = [Token(t["form"], t.get("pos", "_")) for t in doc["tokens"]]
            n = len(tokens)
            supertags = []
            for row in doc["supertags"]:
                cands = []
                for entry in row:
                    text = entry["graph"]
                    g = None if text.strip() == "_|_" else parse_asgraph(text)
                    cands.append(Candidate(g, _float(entry["score"]), entry.get("lexlabel")))
                supertags.append(cands)
            edges = np.full((n + 1, n + 1), _float(doc.get("edge_default", 0.0)))
            for i, k, score in doc.get("edges", []):
                _check_index(i, k, n)
                edges[i, k] = _float(score)
            labels: Dict[Tuple[int, int], Dict[EdgeOp, float]] = {}
            for i, k, op, score in doc.get("labels", []):
                _check_index(i, k, n)
                labels.setdefault((i, k), {})[EdgeOp.parse(op)] = _float(score)
            return cls(tokens, supertags, edges, labels, _float(doc.get("label_default", 0.0)))
        except (KeyError, TypeError) as exc:
            raise ScoreTableError(f"malformed score table: {exc!r}") from None

    @classmethod
    def loads(cls, text: str) -> "ScoreTable":
        return cls.from_json(json.loads(text))


def _check_index(i, k, n):
    if not (0 <= i <= n and 1 <= k <= n and i != k):
        raise ScoreTableError(f"edge index ({i}, {k}) out of range for n={n}")


def _num(x: float):
    if x == NEG_INF:
        return "-inf"
    return float(x)


def _float(x) -> float:
    if isinstance(x, str):
        if x.strip() in ("-inf", "-Infinity"):
            return NEG_INF
        raise ScoreTableError(f"bad score {x!r}")
    return float(x)


def from_scores(
    forms: Sequence[str],
    supertags: Sequence[Iterable[Tuple[Optional[AsGraph], float]]],
    edges: Optional[np.ndarray] = None,
    labels: Optional[Dict[Tuple[int, int], Dict[EdgeOp, float]]] = None,
    label_default: float = 0.0,
    pos: Optional[Sequence[str]] = None,
) -> ScoreTable:
    """Convenience constructor for tests and scripts."""
    n = len(forms)
    tokens = [Token(f, pos[i] if pos else "_") for i, f in enumerate(forms)]
    cands = [[Candidate(g, float(s)) for g, s in row] for row in supertags]
    if edges is None:
        edges = np.zeros((n + 1, n + 1))
    return ScoreTable(tokens, cands, edges, dict(labels or {}), label_default)
