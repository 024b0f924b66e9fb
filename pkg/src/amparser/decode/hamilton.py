"""Score tables encoding Hamiltonian-path instances, and a brute-force checker."""

from __future__ import annotations

import itertools
from typing import Iterable, List, Set, Tuple

import numpy as np

from ..amdep import Token
from ..amtypes import APP
from ..asgraph import parse_asgraph
from .scoretable import NEG_INF, Candidate, ScoreTable

Digraph = Tuple[int, Set[Tuple[int, int]]]


def node_supertag(i: int):
    """One labeled node with an s-source leaf; type (s)."""
    return parse_asgraph(f"(x<root> / v{i} :next (y<s>))")


def final_supertag(n: int):
    return parse_asgraph(f"(x<root> / v{n})")


def build_hamiltonian_instance(n: int, edges: Iterable[Tuple[int, int]]) -> ScoreTable:
    """Score table whose best well-typed tree scores n-1 iff the digraph has a
    Hamiltonian path ending at node n."""
    if n < 2:
        raise ValueError("the reduction needs at least two nodes")
    E = np.zeros((n + 1, n + 1))
    for i, k in edges:
        if not (1 <= i <= n and 1 <= k <= n) or i == k:
            raise ValueError(f"bad edge ({i}, {k}) for a simple digraph on {n} nodes")
        E[i, k] = 1.0
    tokens = [Token(f"v{i}", "X") for i in range(1, n + 1)]
    supertags: List[List[Candidate]] = []
    for i in range(1, n):
        supertags.append([Candidate(node_supertag(i), 0.0), Candidate(None, NEG_INF)])
    supertags.append([Candidate(final_supertag(n), 0.0), Candidate(None, NEG_INF)])
    # only APP_s is allowed; any other label (MOD_s in particular) is forbidden
    labels = {
        (h, d): {APP("s"): 0.0}
        for h in range(1, n + 1)
        for d in range(1, n + 1)
        if h != d
    }
    return ScoreTable(tokens, supertags, E, labels, label_default=NEG_INF)


def has_hamiltonian_path(n: int, edges: Iterable[Tuple[int, int]]) -> bool:
    """Brute force over node orders: a path visiting every node once and ending at n."""
    edges = set(edges)
    for perm in itertools.permutations(range(1, n)):
        path = perm + (n,)
        if all((path[j], path[j + 1]) in edges for j in range(n - 1)):
            return True
    return False


def parse_digraph(text: str) -> Digraph:
    """Digraph file: lines "i k"; an optional first line "n N" fixes the node count."""
    edges = set()
    n = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two fields")
        if parts[0] == "n":
            n = max(n, int(parts[1]))
            continue
        i, k = int(parts[0]), int(parts[1])
        edges.add((i, k))
        n = max(n, i, k)
    return n, edges


def decide(table: ScoreTable, result) -> bool:
    return result.status == "exact-goal" and result.score == table.n - 1


def _pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, k) for i in range(1, n + 1) for k in range(1, n + 1) if i != k]


def all_digraphs(n: int):
    """Every simple digraph on n nodes as a bitmask over `_pairs(n)`, together
    with the index of its canonical representative under relabelings of
    nodes 1..n-1 (node n stays fixed, as it ends the path)."""
    pairs = _pairs(n)
    index = {p: j for j, p in enumerate(pairs)}
    codes = np.arange(1 << len(pairs), dtype=np.int64)
    canon = codes.copy()
    for perm in itertools.permutations(range(1, n)):
        image = dict(zip(range(1, n), perm))
        image[n] = n
        moved = np.zeros_like(codes)
        for j, (i, k) in enumerate(pairs):
            moved |= ((codes >> j) & 1) << index[(image[i], image[k])]
        np.minimum(canon, moved, out=canon)
    reps, inverse = np.unique(canon, return_inverse=True)
    return pairs, codes, reps, inverse


def brute_force_verdicts(n: int, codes: np.ndarray) -> np.ndarray:
    """Vectorized brute force: does each digraph have a path through all
    nodes ending at n?"""
    pairs = _pairs(n)
    index = {p: j for j, p in enumerate(pairs)}
    found = np.zeros(len(codes), dtype=bool)
    for perm in itertools.permutations(range(1, n)):
        path = perm + (n,)
        mask = 0
        for a, b in zip(path, path[1:]):
            mask |= 1 << index[(a, b)]
        found |= (codes & mask) == mask
    return found


def sweep(n: int, decoder) -> Tuple[int, int]:
    """Run `decoder` on one representative per relabeling class of digraphs
    on n nodes and compare its verdict with brute force on every digraph.
    Returns (digraphs checked, agreements)."""
    pairs, codes, reps, inverse = all_digraphs(n)
    rep_verdicts = np.zeros(len(reps), dtype=bool)
    for r, code in enumerate(reps):
        edges = [pairs[j] for j in range(len(pairs)) if (int(code) >> j) & 1]
        table = build_hamiltonian_instance(n, edges)
        rep_verdicts[r] = decide(table, decoder(table))
    truth = brute_force_verdicts(n, codes)
    return len(codes), int(np.sum(rep_verdicts[inverse] == truth))
