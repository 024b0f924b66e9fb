"""Smatch: triple overlap between two AMRs under the best variable mapping.

Graphs are turned into instance, attribute and relation triples.  Constant
leaves (strings, numbers, +/-) with a single incoming edge become attribute
triples of their parent rather than variables.  The mapping is found by
hill climbing from a label-based start plus seeded random restarts, so the
result is a lower bound on the true optimum.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..asgraph import AsGraph
from ..penman import is_constant_label
from .amr import SYMBOL_CONSTANTS


@dataclass(frozen=True)
class Triples:
    variables: Tuple[int, ...]
    instances: Dict[int, str]
    attributes: Tuple[Tuple[int, str, str], ...]
    relations: Tuple[Tuple[int, str, int], ...]

    def __len__(self) -> int:
        return len(self.instances) + len(self.attributes) + len(self.relations)


def _is_attribute(g: AsGraph, node: int, indeg: Counter, outdeg: Counter) -> bool:
    lab = g.labels[node]
    if lab is None or node == g.root or indeg[node] != 1 or outdeg[node]:
        return False
    return is_constant_label(lab) or lab in SYMBOL_CONSTANTS


def triples(g: AsGraph) -> Triples:
    indeg, outdeg = Counter(), Counter()
    for s, t, _ in g.edges:
        indeg[t] += 1
        outdeg[s] += 1
    consts = {n for n in g.labels if _is_attribute(g, n, indeg, outdeg)}
    variables = tuple(sorted(n for n in g.labels if n not in consts))
    instances = {n: g.labels[n] for n in variables if g.labels[n] is not None}
    attributes, relations = [], []
    for s, t, lab in sorted(g.edges):
        if t in consts:
            attributes.append((s, lab, g.labels[t]))
        else:
            relations.append((s, lab, t))
    return Triples(variables, instances, tuple(attributes), tuple(relations))


@dataclass(frozen=True)
class SmatchCounts:
    matched: int
    predicted: int
    gold: int

    def __add__(self, other: "SmatchCounts") -> "SmatchCounts":
        return SmatchCounts(self.matched + other.matched, self.predicted + other.predicted, self.gold + other.gold)

    @property
    def precision(self) -> float:
        if self.predicted == 0:
            return 1.0 if self.gold == 0 else 0.0
        return self.matched / self.predicted

    @property
    def recall(self) -> float:
        if self.gold == 0:
            return 1.0 if self.predicted == 0 else 0.0
        return self.matched / self.gold

    @property
    def f(self) -> float:
        p, r = self.precision, self.recall
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)


class _Problem:
    """One pair of graphs: the instance/attribute gain of each variable pair,
    and the relation triples, which are matched under a whole mapping."""

    def __init__(self, t1: Triples, t2: Triples):
        self.v1, self.v2 = list(t1.variables), list(t2.variables)
        self.single: Dict[Tuple[int, int], int] = defaultdict(int)
        attrs2 = defaultdict(Counter)
        for v, rel, c in t2.attributes:
            attrs2[v][(rel, c)] += 1
        attrs1 = defaultdict(Counter)
        for v, rel, c in t1.attributes:
            attrs1[v][(rel, c)] += 1
        for a in self.v1:
            for b in self.v2:
                w = 0
                if a in t1.instances and t1.instances[a] == t2.instances.get(b):
                    w += 1
                if attrs1[a] and attrs2[b]:
                    w += sum((attrs1[a] & attrs2[b]).values())
                if w:
                    self.single[(a, b)] = w
        self.rel1 = list(t1.relations)
        self.rel2 = Counter(t2.relations)

    def score(self, m: Dict[int, Optional[int]]) -> int:
        total = sum(self.single.get((a, b), 0) for a, b in m.items() if b is not None)
        got = Counter()
        for x, rel, y in self.rel1:
            mx, my = m.get(x), m.get(y)
            if mx is not None and my is not None:
                got[(mx, rel, my)] += 1
        return total + sum((got & self.rel2).values())


def _climb(p: _Problem, m: Dict[int, Optional[int]]) -> int:
    best = p.score(m)
    while True:
        used = {b for b in m.values() if b is not None}
        move = None
        gain = 0
        for a in p.v1:
            old = m[a]
            for b in [None] + [b for b in p.v2 if b not in used]:
                if b == old:
                    continue
                m[a] = b
                s = p.score(m)
                if s - best > gain:
                    gain, move = s - best, ("set", a, b)
            m[a] = old
        for i, a in enumerate(p.v1):
            for c in p.v1[i + 1 :]:
                if m[a] == m[c]:
                    continue
                m[a], m[c] = m[c], m[a]
                s = p.score(m)
                if s - best > gain:
                    gain, move = s - best, ("swap", a, c)
                m[a], m[c] = m[c], m[a]
        if move is None:
            return best
        if move[0] == "set":
            m[move[1]] = move[2]
        else:
            m[move[1]], m[move[2]] = m[move[2]], m[move[1]]
        best += gain


def _smart_start(p: _Problem) -> Dict[int, Optional[int]]:
    m: Dict[int, Optional[int]] = {a: None for a in p.v1}
    used = set()
    for a in p.v1:
        options = [(-p.single.get((a, b), 0), k, b) for k, b in enumerate(p.v2) if b not in used]
        if options:
            w, _, b = min(options)
            if w < 0:
                m[a] = b
                used.add(b)
    return m


def _random_start(p: _Problem, rng: random.Random) -> Dict[int, Optional[int]]:
    m: Dict[int, Optional[int]] = {a: None for a in p.v1}
    free = list(p.v2)
    rng.shuffle(free)
    order = list(p.v1)
    rng.shuffle(order)
    for a in order:
        if not free:
            break
        m[a] = free.pop()
    return m


def smatch_counts(g1: AsGraph, g2: AsGraph, restarts: int = 4, seed: int = 0) -> SmatchCounts:
    """Matched triples between predicted `g1` and gold `g2`."""
    t1, t2 = triples(g1), triples(g2)
    p = _Problem(t1, t2)
    rng = random.Random(seed)
    best = _climb(p, _smart_start(p))
    limit = min(len(t1), len(t2))
    for _ in range(restarts):
        if best == limit:
            break
        best = max(best, _climb(p, _random_start(p, rng)))
    return SmatchCounts(best, len(t1), len(t2))


def smatch(g1: AsGraph, g2: AsGraph, restarts: int = 4, seed: int = 0) -> Tuple[float, float, float]:
    c = smatch_counts(g1, g2, restarts, seed)
    return c.precision, c.recall, c.f


def corpus_smatch(
    pairs: Sequence[Tuple[AsGraph, AsGraph]], restarts: int = 4, seed: int = 0
) -> Tuple[SmatchCounts, List[SmatchCounts]]:
    """Micro-averaged counts over sentence pairs plus the per-pair counts.
    Each pair gets its own seed derived from `seed` and its position."""
    per = [smatch_counts(a, b, restarts, seed + i) for i, (a, b) in enumerate(pairs)]
    total = SmatchCounts(0, 0, 0)
    for c in per:
        total = total + c
    return total, per
