"""Maximum spanning arborescences (Chu-Liu-Edmonds)."""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

import numpy as np

# stands in for -inf inside the contraction arithmetic
_FLOOR = -1e12


def max_arborescence(W: np.ndarray, root: int, nodes: Optional[List[int]] = None) -> Dict[int, int]:
    """Best arborescence over `nodes` rooted at `root`; W[h, d] scores h -> d.

    Returns a map dependent -> head.  Ties go to the lowest head index.
    """
    if nodes is None:
        nodes = list(range(W.shape[0]))
    nodes = sorted(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    sub = np.maximum(np.asarray(W, dtype=float)[np.ix_(nodes, nodes)], _FLOOR)
    np.fill_diagonal(sub, -np.inf)
    sub[:, idx[root]] = -np.inf
    heads = _cle(sub, idx[root])
    return {nodes[d]: nodes[h] for d, h in heads.items()}


def _cle(S: np.ndarray, root: int) -> Dict[int, int]:
    m = S.shape[0]
    best = {v: int(np.argmax(S[:, v])) for v in range(m) if v != root}
    cycle = _find_cycle(best, root, m)
    if cycle is None:
        return best
    in_cycle = set(cycle)
    rest = [v for v in range(m) if v not in in_cycle]
    c = len(rest)  # index of the contracted node
    pos = {v: i for i, v in enumerate(rest)}
    T = np.full((c + 1, c + 1), -np.inf)
    enter: Dict[int, int] = {}  # outside head -> cycle node it enters
    leave: Dict[int, int] = {}  # outside dependent -> cycle node it leaves from
    for u in rest:
        for v in rest:
            if u != v:
                T[pos[u], pos[v]] = S[u, v]
        gains = [(S[u, v] - S[best[v], v], v) for v in cycle]
        gain, v = max(gains, key=lambda x: (x[0], -x[1]))
        T[pos[u], c] = gain
        enter[u] = v
    for v in rest:
        scores = [(S[u, v], u) for u in cycle]
        s, u = max(scores, key=lambda x: (x[0], -x[1]))
        T[c, pos[v]] = s
        leave[v] = u
    np.fill_diagonal(T, -np.inf)
    T[:, pos[root]] = -np.inf
    sub = _cle(T, pos[root])
    heads: Dict[int, int] = {}
    for d, h in sub.items():
        if d == c:
            u = rest[h]
            v = enter[u]
            heads[v] = u
            for w in cycle:
                if w != v:
                    heads[w] = best[w]
        elif h == c:
            heads[rest[d]] = leave[rest[d]]
        else:
            heads[rest[d]] = rest[h]
    return heads


def _find_cycle(best: Dict[int, int], root: int, m: int) -> Optional[List[int]]:
    color = [0] * m
    for start in range(m):
        if start == root or color[start]:
            continue
        path = []
        v = start
        while v != root and color[v] == 0:
            color[v] = 1
            path.append(v)
            v = best[v]
        if v != root and color[v] == 1:
            return path[path.index(v) :]
        for p in path:
            color[p] = 2
    return None


def arborescence_score(W: np.ndarray, heads: Dict[int, int]) -> float:
    return float(sum(W[h, d] for d, h in heads.items()))


def cle_arborescence(E: np.ndarray) -> Dict[int, int]:
    """Best tree over tokens 1..n under the virtual root 0, which gets exactly one child.

    Runs CLE once per candidate root token r and adds E[0, r]; returns
    dependent -> head with head 0 for the root token.
    """
    n = E.shape[0] - 1
    best: Optional[Tuple[float, Dict[int, int]]] = None
    tokens = list(range(1, n + 1))
    for r in tokens:
        heads = max_arborescence(E, r, tokens) if n > 1 else {}
        score = arborescence_score(E, heads) + float(E[0, r])
        if best is None or score > best[0]:
            heads = dict(heads)
            heads[r] = 0
            best = (score, heads)
    return best[1]


def cle_forest_merge(E: np.ndarray) -> Dict[int, int]:
    """Unconstrained CLE from the virtual root; if several tokens hang off the
    root, keep the one with the highest root score and attach the others to it."""
    heads = max_arborescence(E, 0)
    roots = [d for d, h in heads.items() if h == 0]
    if len(roots) > 1:
        keep = max(roots, key=lambda r: (E[0, r], -r))
        for r in roots:
            if r != keep:
                heads[r] = keep
    return heads
